"""Synthetic burst datasets: generation, storage and the SNR/channel grid."""
