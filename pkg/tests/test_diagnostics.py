"""Diagnostics: snapshot closed forms, energy oracles, monotonicity audits."""

import dataclasses
import math

import numpy as np
import pytest

import curveflow as cf

H25 = cf.CosinePerturbed(a=1.0, b=0.12, n=5, m=2)
A34 = cf.CosinePerturbed(a=1.0, b=0.5, n=4, m=3)
ENEG32 = cf.CosinePerturbed(a=1.0, b=0.3, n=2, m=3)


def ap(alpha, m):
    return cf.FlowParams(alpha=alpha, m=m, kind="ap")


def lp(alpha, m):
    return cf.FlowParams(alpha=alpha, m=m, kind="lp")


class TestSnapshot:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_circle_closed_forms(self, alpha):
        r, m = 2.0, 3
        s = cf.generate_support(cf.MFoldCircle(r=r, m=m), 128)
        d = cf.snapshot(s, ap(alpha, m))
        assert abs(d.E) < 1e-12
        assert d.psi_max == pytest.approx(r ** (-2 * alpha), rel=1e-12)
        assert d.F_int == pytest.approx(2 * m * math.pi * r**-alpha, rel=1e-12)
        assert abs(d.isop_gap) < 1e-9
        assert d.lam == pytest.approx(r**-alpha, rel=1e-12)
        assert d.h_ratio == pytest.approx(1.0, rel=1e-14)

    def test_single_mode_energy(self):
        # v = c + eps*cos(k*theta), k = n/m: E = eps^2 * m * pi * (k^2 - 1), exact
        g = cf.build_grid(2, 256)
        eps, k = 0.05, 2.5
        v = cf.PeriodicField(g, 1.0 + eps * np.cos(k * g.theta))
        s = cf.support_of(cf.CurvatureState(g, v), 1.0)
        d = cf.snapshot(s, ap(1.0, 2))
        assert d.E == pytest.approx(eps**2 * 2 * math.pi * (k**2 - 1), rel=1e-12)

    def test_low_mode_energy_is_negative(self):
        g = cf.build_grid(3, 256)
        eps, k = 0.05, 2.0 / 3.0
        v = cf.PeriodicField(g, 1.0 + eps * np.cos(k * g.theta))
        s = cf.support_of(cf.CurvatureState(g, v), 1.0)
        d = cf.snapshot(s, lp(1.0, 3))
        assert d.E == pytest.approx(eps**2 * 3 * math.pi * (k**2 - 1), rel=1e-12)
        assert d.E < 0

    def test_eneg32_initial_energy_series_oracle(self):
        # independent oracle: Fourier series of v = 1/(1 + eps*cos(phi)) with
        # eps = b*(1 - (n/m)^2) = 1/6; coefficients c_q = (-rho)^q / sqrt(1-eps^2),
        # rho = (1 - sqrt(1 - eps^2))/eps, and E = m*pi*sum (2 c_q)^2 ((q*n/m)^2 - 1)
        s = cf.generate_support(ENEG32, 1024)
        d = cf.snapshot(s, lp(1.0, 3))
        eps = 0.3 * (1 - (2 / 3) ** 2)
        root = math.sqrt(1 - eps**2)
        rho = (1 - root) / eps
        e_oracle = 0.0
        for q in range(1, 40):
            amp = 2.0 * rho**q / root
            e_oracle += amp**2 * ((q * 2 / 3) ** 2 - 1)
        e_oracle *= 3 * math.pi
        assert d.E == pytest.approx(e_oracle, rel=1e-10)
        assert d.E < 0

    @pytest.mark.parametrize("spec,m", [(H25, 2), (A34, 3)])
    @pytest.mark.parametrize("alpha", [0.5, 2.0])
    def test_energy_parseval_oracle(self, spec, m, alpha):
        s = cf.generate_support(spec, 256)
        params = ap(alpha, m)
        e_quad = cf.curvature_energy(s, params)
        e_spec = cf.curvature_energy_spectral(s, params)
        assert e_quad == pytest.approx(e_spec, rel=1e-10, abs=1e-12)

    def test_prop_p_tracking(self):
        s = cf.generate_support(A34, 256)
        d = cf.snapshot(s, ap(1.0, 3), prop_n=4)
        assert d.prop_p is True
        d2 = cf.snapshot(s, ap(1.0, 3))
        assert d2.prop_p is None


def _series(kind="ap", alpha=1.0, N=128, t_end=0.2):
    spec = H25
    s = cf.generate_support(spec, N)
    params = cf.FlowParams(alpha=alpha, m=2, kind=kind)
    ctl = cf.StepControl(t_end=t_end, sample_interval=t_end / 20)
    out = cf.run(s, params, ctl)
    return out, params


class TestMonotonicity:
    def test_clean_ap_series_passes(self):
        out, params = _series("ap")
        rep = cf.check_monotonicity(out.series, params, verdict_kind=out.verdict.kind)
        assert rep.all_pass, str(rep)
        names = [e.name for e in rep.entries]
        assert "area conserved (ap)" in names
        assert "length non-increasing (ap)" in names

    def test_clean_lp_series_passes(self):
        out, params = _series("lp")
        rep = cf.check_monotonicity(out.series, params, verdict_kind=out.verdict.kind)
        assert rep.all_pass, str(rep)
        assert "energy non-increasing (lp)" in [e.name for e in rep.entries]

    def test_lp_circle_zero_margins(self):
        s = cf.generate_support(cf.MFoldCircle(r=1.0, m=2), 64)
        params = lp(1.0, 2)
        ctl = cf.StepControl(t_end=0.5, sample_interval=0.05)
        out = cf.run(s, params, ctl)
        rep = cf.check_monotonicity(out.series, params, verdict_kind="timelimit")
        assert rep.all_pass
        for e in rep.entries:
            assert e.worst <= 1e-13, e

    def test_area_violation_flagged_at_right_sample(self):
        out, params = _series("ap")
        series = list(out.series)
        k = len(series) // 2
        bad = dataclasses.replace(series[k], A=series[k].A * 1.01)
        series[k] = bad
        rep = cf.check_monotonicity(series, params)
        entry = {e.name: e for e in rep.entries}["area conserved (ap)"]
        assert not entry.passed
        assert entry.t_worst == pytest.approx(bad.t)

    def test_lp_energy_violation_flagged(self):
        out, params = _series("lp")
        series = list(out.series)
        k = len(series) // 2
        series[k] = dataclasses.replace(series[k], E=series[k].E + 1.0)
        rep = cf.check_monotonicity(series, params)
        entry = {e.name: e for e in rep.entries}["energy non-increasing (lp)"]
        assert not entry.passed

    def test_psi_violation_flagged(self):
        out, params = _series("ap")
        series = list(out.series)
        # the bound is max(running max of v^2, Psi(0)); exceed it decisively
        series[-1] = dataclasses.replace(series[-1], psi_max=series[0].psi_max * 100)
        rep = cf.check_monotonicity(series, params)
        entry = {e.name: e for e in rep.entries}["gradient bound on psi"]
        assert not entry.passed

    def test_f_bound_reported_only_on_blowup(self):
        out, params = _series("ap")
        rep = cf.check_monotonicity(out.series, params, verdict_kind="blowup")
        entry = {e.name: e for e in rep.entries}["curvature integral F bounded"]
        assert entry.passed and "reported" in entry.note

    def test_al_window_entries_present(self):
        s = cf.generate_support(A34, 256)
        params = ap(1.0, 3)
        ctl = cf.StepControl(t_end=0.5, sample_interval=0.05)
        out = cf.run(s, params, ctl, al_n=4)
        rep = cf.check_monotonicity(out.series, params, verdict_kind=out.verdict.kind)
        names = [e.name for e in rep.entries]
        assert "monotone-support property persists" in names
        assert "support window [h0(m*pi/n), h0(0)]" in names
        assert rep.all_pass, str(rep)


class TestRateCheck:
    def test_circle_rates_vanish(self):
        s = cf.generate_support(cf.MFoldCircle(r=1.0, m=2), 64)
        for params in (ap(1.0, 2), lp(1.0, 2)):
            assert cf.rate_check(s, params, 1e-5) < 1e-12

    def test_h25_ap_rate(self):
        s = cf.generate_support(H25, 256)
        assert cf.rate_check(s, ap(1.0, 2), 1e-5) <= 1e-8

    def test_h25_lp_rate_and_sign(self):
        s = cf.generate_support(H25, 256)
        assert cf.rate_check(s, lp(1.0, 2), 1e-5) <= 1e-8
        # along lp the area rate -integral(kappa^alpha - lambda) ds is nonnegative
        g = s.grid
        from curveflow.flow import _u_of
        u = _u_of(s.h.values, g)
        lam = cf.lambda_of(s, lp(1.0, 2))
        rate = -(g.dtheta * np.sum(np.ones_like(u))) + lam * g.dtheta * np.sum(u)
        assert rate >= 0.0

    def test_order_of_accuracy(self):
        # halving dt_probe should cut the discrepancy about fourfold
        s = cf.generate_support(A34, 256)
        params = ap(1.0, 3)
        e1 = cf.rate_check(s, params, 4e-4)
        e2 = cf.rate_check(s, params, 2e-4)
        assert e2 < e1 / 2.5


class TestSpreading:
    def test_circle_trivial(self):
        s = cf.generate_support(cf.MFoldCircle(r=1.0, m=2), 64)
        rep = cf.spreading_check([s], ap(1.0, 2))
        assert rep.all_pass

    def test_h25_initial_state(self):
        s = cf.generate_support(H25, 256)
        rep = cf.spreading_check([s], ap(1.0, 2))
        assert rep.all_pass

    def test_blowup_run_states(self):
        spec = cf.CosinePerturbed(a=0.35, b=1.0, n=8, m=7)
        s = cf.generate_support(spec, 256)
        params = ap(1.0, 7)
        ctl = cf.StepControl(t_end=0.3, sample_interval=4e-4)
        out = cf.run(s, params, ctl)
        assert out.verdict.kind == "blowup"
        rep = cf.spreading_check(out.states, params)
        assert rep.all_pass, str(rep)
