"""Ext charts over A(n), Koszul and Atiyah-Hirzebruch spectral sequences, and tmf-based Mahowald invariants."""
