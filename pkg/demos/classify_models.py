"""Walk one model from each regime through the classifier.

Shows the polynomial/exponential dichotomy on scalar models, the
multi-delay route, and a small matrix system, printing each report as the
CLI would.
"""

import json

import numpy as np

from pantolab import exponents, models


def show(title, report):
    print(f"--- {title}")
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    print()


def main():
    # polynomial decay: the delayed feedback is weaker than the drift pull
    m1 = models.ScalarPantographModel(a=-2.0, b=1.0, sigma=0.3, rho=0.0, q=0.5)
    show("scalar, first mean (p=1)", exponents.classify_scalar(m1, p=1))

    # delayed noise engages the mean-square closed form
    m2 = models.ScalarPantographModel(a=-2.0, b=0.3, sigma=0.5, rho=0.2, q=0.5)
    show("scalar, mean square (p=2)", exponents.classify_scalar(m2, p=2))

    # no delayed terms at all: geometric Brownian motion, exponential regime
    m3 = models.ScalarPantographModel(a=-1.0, b=0.0, sigma=0.2, rho=0.0, q=0.5)
    show("scalar, degenerate (p=2)", exponents.classify_scalar(m3, p=2))

    # two delay channels share one characteristic equation
    m4 = models.MultiDelayModel(a=-5.0, b=(1.0, 1.0), q=(0.5, 0.25))
    show("multi-delay", exponents.multi_delay_classify(m4))

    # 2x2 system: Lyapunov data plus stability conditions
    m5 = models.MatrixModel(A=np.diag([-1.0, -2.0]), B=np.zeros((2, 2)),
                            Sigma=0.1 * np.eye(2), Theta=np.zeros((2, 2)),
                            q=0.5, d=2)
    show("matrix, corollary mode", exponents.matrix_classify(m5, mode="corollary"))


if __name__ == "__main__":
    main()
