"""hj-reinit - Loeser und Pruefstand fuer die Reinitialisierungsgleichung u_t + f(x) H(||grad u||) = 0."""

__version__ = "0.4.0"
__year__ = "2026"
