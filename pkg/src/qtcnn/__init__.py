"""Hybrid quantum-classical models for cross-sectional equity ranking.

Subpackages:
    qsim      dense state-vector simulator (compiled kernels with numpy fallback)
    circuits  convolutional/ansatz circuit evaluation and fidelity kernels
    autodiff  minimal reverse-mode engine plus parameter-shift quantum nodes
    models    model zoo (QTCNN, QCNN, QNN, MLP, momentum baseline) and training
    datapipe  panel ingestion, synthetic data, features, labels, sequences
    backtest  long-short portfolio construction, Sharpe, bootstrap CI
    cli       command-line entry points (synth / prepare / train / backtest / bench)
"""

__version__ = "0.1.0"
