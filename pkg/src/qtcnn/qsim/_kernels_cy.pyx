# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled gate kernels: same contract as _kernels_py, loop-based pair updates.

Wire w is bit w of the basis index; the partner of index i is i ^ (1 << w).
Pair p in [0, dim/2) maps to i0 = ((p >> w) << (w+1)) | (p & ((1 << w) - 1)),
which enumerates every index whose bit w is zero.
"""

from libc.math cimport cos, sin


def apply_ry(double complex[::1] amps, int wire, double theta):
    cdef double c = cos(0.5 * theta)
    cdef double s = sin(0.5 * theta)
    cdef Py_ssize_t half = amps.shape[0] >> 1
    cdef Py_ssize_t step = (<Py_ssize_t>1) << wire
    cdef Py_ssize_t mask = step - 1
    cdef Py_ssize_t p, i0, i1
    cdef double complex a0, a1
    with nogil:
        for p in range(half):
            i0 = ((p >> wire) << (wire + 1)) | (p & mask)
            i1 = i0 + step
            a0 = amps[i0]
            a1 = amps[i1]
            amps[i0] = c * a0 - s * a1
            amps[i1] = s * a0 + c * a1


def apply_rz(double complex[::1] amps, int wire, double theta):
    cdef double complex phase_lo = cos(0.5 * theta) - 1j * sin(0.5 * theta)
    cdef double complex phase_hi = cos(0.5 * theta) + 1j * sin(0.5 * theta)
    cdef Py_ssize_t half = amps.shape[0] >> 1
    cdef Py_ssize_t step = (<Py_ssize_t>1) << wire
    cdef Py_ssize_t mask = step - 1
    cdef Py_ssize_t p, i0
    with nogil:
        for p in range(half):
            i0 = ((p >> wire) << (wire + 1)) | (p & mask)
            amps[i0] = amps[i0] * phase_lo
            amps[i0 + step] = amps[i0 + step] * phase_hi


def apply_cnot(double complex[::1] amps, int control, int target):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t cbit = (<Py_ssize_t>1) << control
    cdef Py_ssize_t tbit = (<Py_ssize_t>1) << target
    cdef Py_ssize_t i, j
    cdef double complex tmp
    with nogil:
        for i in range(dim):
            if (i & cbit) != 0 and (i & tbit) == 0:
                j = i | tbit
                tmp = amps[i]
                amps[i] = amps[j]
                amps[j] = tmp


def expect_z(double complex[::1] amps, int wire):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t wbit = (<Py_ssize_t>1) << wire
    cdef Py_ssize_t i
    cdef double acc = 0.0
    cdef double p
    with nogil:
        for i in range(dim):
            p = amps[i].real * amps[i].real + amps[i].imag * amps[i].imag
            if (i & wbit) == 0:
                acc += p
            else:
                acc -= p
    return acc
