"""Walk through the package's certificate machinery on small worked examples.

Run:  python demos/worked_examples.py
"""

import numpy as np

from scert import (
    ClassDiff,
    ClassifierAtPoint,
    ClassWise,
    FinitePoints,
    LpBall,
    Uniform,
    adversarial_witness,
    lipschitz_certificate,
    lipschitz_constant_from_gradients,
    s_certificate,
)
from scert.geometry import region_to_interval


def one_dimensional_binary():
    """A 1D linear binary classifier evaluated at x = -1.

    f1(x) = x - 1 and f2(x) = -x + 1, so the gradients are the singletons
    {+1} and {-1}, the predicted class is 2 (index 1) and the gap is 4.
    """
    print("== one-dimensional binary classifier ==")
    logits = [-2.0, 2.0]

    uniform = ClassifierAtPoint(logits, Uniform(FinitePoints([[-1.0], [1.0]])))
    cert_u = s_certificate(uniform, "u")
    print("uniform polar certificate:", region_to_interval(cert_u.region))

    class_wise = ClassifierAtPoint(
        logits, ClassWise((FinitePoints([[1.0]]), FinitePoints([[-1.0]]))))
    cert_cw = s_certificate(class_wise, "cw")
    print("class-wise polar certificate:", region_to_interval(cert_cw.region),
          "(half-infinite: every perturbation to the left keeps class 2)")

    # outside the uniform certificate a flipping classifier always exists
    witness = adversarial_witness(FinitePoints([[-1.0], [1.0]]), 4.0, [0.0], [2.1])
    print("witness logits at x + 2.1:", witness.logits_at([2.1]), "-> flipped\n")


def piecewise_linear_pair():
    """Two piecewise-linear confidences with slopes {0.1, 1.1} and {0.3, 1.3}.

    The class-wise certificate uses all slope differences; the
    class-difference certificate uses only the (constant) slope of f2 - f1
    and is one-sidedly unbounded.
    """
    print("== piecewise-linear pair at x0 = 2 ==")
    logits = [0.9, 0.7]
    cw = ClassifierAtPoint(logits, ClassWise((FinitePoints([[0.1], [1.1]]),
                                              FinitePoints([[0.3], [1.3]]))))
    print("class-wise:", region_to_interval(s_certificate(cw, "cw").region))
    cd = ClassifierAtPoint(logits, ClassDiff({(1, 0): FinitePoints([[0.2]])}))
    print("class-difference:", region_to_interval(s_certificate(cd, "cd").region), "\n")


def gradient_cloud_versus_norm_ball():
    """A 2D gradient cloud: bounding it by a dual-norm ball loses area.

    The cloud's largest l1 norm is 1.5, so the classical certificate is the
    linf ball of radius 1/3; the polar certificate of the exact cloud is a
    strictly larger polygon.
    """
    print("== gradient cloud vs dual-norm ball ==")
    cloud = FinitePoints([[1.0, 0.5], [0.6, -0.4], [-0.3, 0.4],
                          [-0.5, -0.25], [0.2, 0.8]])
    logits = [1.0, 0.0]
    constant = lipschitz_constant_from_gradients(cloud, 1)
    lip = lipschitz_certificate(
        ClassifierAtPoint(logits, Uniform(LpBall(1, constant, [0, 0]))), "u")
    print(f"l1 constant {constant} -> linf certificate radius {lip.radius:.6f}")
    polar = s_certificate(ClassifierAtPoint(logits, Uniform(cloud)), "u")
    corner = np.array([1 / 3, 1 / 3])
    print("polar certificate halfspaces:", polar.region.n_halfspaces)
    print("box corner certified by both:", lip.contains(corner),
          polar.contains(corner))
    beyond = np.array([0.55, 0.0])
    print("point beyond the box, still certified by the polar certificate:",
          lip.contains(beyond), polar.contains(beyond))


if __name__ == "__main__":
    one_dimensional_binary()
    piecewise_linear_pair()
    gradient_cloud_versus_norm_ball()
