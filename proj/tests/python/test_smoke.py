import cmath
import math

import numpy as np
import pytest

import mbamp


def test_box_scattering_matches_closed_form():
    sd = mbamp.ScatteringData(mbamp.Pulse.box(5.0, 2.0))
    for k in (-2.0, 0.3, 1.7):
        w = cmath.sqrt(k * k + 6.25)
        b = 2.5 / w * cmath.sin(2 * w) * cmath.exp(2j * k)
        assert abs(sd.ab(k).b - b) < 1e-8
        ab = sd.ab(k)
        assert abs(abs(ab.a) ** 2 + abs(ab.b) ** 2 - 1) < 1e-8


def test_single_soliton():
    spec = mbamp.find_zeros(mbamp.ScatteringData(mbamp.Pulse.box(5.0, 2.0)))
    assert len(spec) == 1
    k = spec.zeros[0].k
    assert abs(k - 1j * math.sqrt(6.25 - math.pi ** 2 / 4)) < 1e-6
    assert spec.zeros[0].velocity == pytest.approx(4 * abs(k) ** 2 / (1 + 4 * abs(k) ** 2))


def test_regions_and_light_cone():
    assert mbamp.classify(1.0, 2.0, 2.0).region == mbamp.Region.Causal
    tag = mbamp.classify(10.05, 10.0, 2.0)
    assert tag.region == mbamp.Region.PartI
    sd = mbamp.ScatteringData(mbamp.Pulse.smooth_bump(1.0, 2.0, 1.0))
    v = mbamp.eval_lightcone(tag, 10.0, 0.05, sd)
    assert abs(v.field.E) > 0


def test_tail_away_from_solitons():
    sd = mbamp.ScatteringData(mbamp.Pulse.smooth_bump(1.0, 2.0, 1.0))
    v = mbamp.eval_tail(sd, mbamp.SolitonSpectrum(), 200.0, 100.0)
    assert v.soliton is None
    assert v.field.N == -1.0
    assert v.error_scale == pytest.approx(0.01)


def test_oracle_grid():
    spec = mbamp.SimSpec()
    spec.h, spec.t_max, spec.x_max = 0.02, 3.0, 3.0
    g = mbamp.simulate(mbamp.Pulse.box(1.0, 1.0), spec)
    arr = g.arrays()
    assert arr["E"].shape == g.shape == (151, 151)
    assert np.all(np.triu(np.abs(arr["E"])) == 0)
    assert g.report.conservation < 1e-12
    f = g.probe(0.5, 0.0)
    assert abs(f.E - 1.0) < 1e-12


def test_probes_and_errors():
    spec = mbamp.SimSpec()
    spec.h, spec.t_max, spec.x_max = 0.02, 2.0, 2.0
    values, report = mbamp.simulate_probes(mbamp.Pulse.box(1.0, 1.0), spec, [(1.5, 0.5), (1.0, 1.5)])
    assert values[1].N == 1.0
    assert report.causality == 0.0
    spec.h = 0.5
    with pytest.raises(mbamp.MbampError) as exc:
        mbamp.simulate(mbamp.Pulse.box(1.0, 1.0), spec)
    assert exc.value.kind == "CFLViolation"


def test_special_functions():
    x = 3.0
    assert mbamp.bessel_i(0.5, x) == pytest.approx(math.sqrt(2 / (math.pi * x)) * math.sinh(x), rel=1e-12)
    mod, _ = mbamp.gamma_imag(1.0)
    assert mod ** 2 == pytest.approx(math.pi / math.sinh(math.pi), rel=1e-10)
