import mpmath as mp
import pytest

from singquad.integrand import corpus

mp.mp.dps = 40


def mp_evaluator(f):
    """High-precision evaluator built from the JSON description, not from the
    package's evaluation code."""
    d = f.to_dict()
    if "raw" in d:
        raw = {
            "inv_pow32": lambda x: (1 - x) ** mp.mpf(-1.5),
            "inv_pow32_cos": lambda x: (1 - x) ** mp.mpf(-1.5) * mp.cos(x),
            "bounded_cos3": lambda x: mp.cos(3 * x),
        }[d["raw"]]
        return lambda x: raw(mp.mpf(x))
    terms = [(mp.mpf(t["coeff"]), mp.mpf(t["exponent_num_over_2"]) / 2) for t in d["terms"]]
    poly = [mp.mpf(c) for c in d["smooth_poly_coeffs"]]

    def ev(x):
        x = mp.mpf(x)
        return (sum(c * (1 - x) ** p for c, p in terms)
                + sum(c * x ** i for i, c in enumerate(poly)))

    return ev


CORPUS = corpus()


@pytest.fixture(params=CORPUS, ids=lambda f: f.name)
def fixture_integrand(request):
    return request.param


def by_tag(*tags):
    return [f for f in CORPUS if f.class_tag.value in tags]
