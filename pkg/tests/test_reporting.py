#!/usr/bin/env python3
"""
派生指标、参考数据复核与策略分析测试
"""

import math
import tempfile
import unittest
from pathlib import Path

from src.pglab import analyze, default_library, write_netlist
from src.pglab.config import Config, DEFAULT_LIBRARY_FILE, ReportConstants, Strategies, set_config
from src.pglab.config.params import load_device_params
from src.pglab.models import (
    DomainError, InfeasibleError, ReportError, load_cell_library, generate_multiplier4x4
)
from src.pglab.reporting import (
    AnalysisSettings, delta_d_over_d, shift_from_dbc, improvement_over_dbc,
    load_paper_dataset, verify_paper_tables, run_strategy, compare_strategies,
    get_supported_strategies, with_overrides
)

NM = 1e-9


class TestMetrics(unittest.TestCase):
    """百分比指标测试"""

    def test_worked_examples(self):
        self.assertAlmostEqual(delta_d_over_d(2.6052e-10, 2.3836e-10), 9.29, delta=0.01)
        self.assertAlmostEqual(shift_from_dbc(2.8091e-10, 2.6052e-10), 7.82, delta=0.01)
        self.assertAlmostEqual(improvement_over_dbc(2.5455e-10, 2.6052e-10), 2.29, delta=0.01)

    def test_identity(self):
        self.assertEqual(delta_d_over_d(2.3836e-10, 2.3836e-10), 0.0)
        self.assertEqual(shift_from_dbc(2.6052e-10, 2.6052e-10), 0.0)
        self.assertEqual(improvement_over_dbc(2.6052e-10, 2.6052e-10), 0.0)

    def test_reference_must_be_positive(self):
        with self.assertRaises(DomainError):
            delta_d_over_d(1e-10, 0.0)
        with self.assertRaises(DomainError):
            improvement_over_dbc(1e-10, -1e-10)


class TestPaperVerification(unittest.TestCase):
    """参考数据复核测试"""

    @classmethod
    def setUpClass(cls):
        cls.ds = load_paper_dataset()
        cls.report = verify_paper_tables(cls.ds)

    def test_dataset(self):
        self.assertEqual(len(self.ds.conventional), 5)
        self.assertEqual(len(self.ds.cbstd), 4)
        self.assertEqual(self.ds.scalars['d_bc'], 2.6052e-10)
        self.assertEqual(self.ds.comparison_row('tunable').word, "1000")
        with self.assertRaises(ReportError):
            self.ds.comparison_row('ungated')

    def test_every_derivable_value_checked(self):
        self.assertEqual(len(self.report.lines), 19)
        self.assertEqual(self.report.failures, [])

    def test_single_known_discrepancy(self):
        discrepancies = self.report.known_discrepancies
        self.assertEqual(len(discrepancies), 1)
        line = discrepancies[0]
        self.assertIn("dstn", line.name)
        self.assertEqual(line.printed, "0.90")
        self.assertAlmostEqual(float(line.computed), 0.6948, delta=0.001)

    def test_power_and_delay_scalars(self):
        lines = {line.name: line for line in self.report.lines}
        self.assertEqual(lines["tunable power reduction"].status, ReportConstants.PASS)
        self.assertEqual(lines["tunable delay increase"].status, ReportConstants.PASS)
        self.assertEqual(lines["delay budget limit"].status, ReportConstants.PASS)
        self.assertEqual(lines["cbstd table selection"].computed, "400nm")

    def test_verification_is_pure(self):
        again = verify_paper_tables(self.ds)
        self.assertEqual(again.to_records(), self.report.to_records())

    def test_malformed_dataset(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "broken.yaml"
            path.write_text("scalars:\n  d0: 2.3836e-10\n", encoding='utf-8')
            with self.assertRaises(ReportError):
                load_paper_dataset(path)


class TestStrategyAnalysis(unittest.TestCase):
    """端到端策略分析测试"""

    @classmethod
    def setUpClass(cls):
        with open(DEFAULT_LIBRARY_FILE, 'r', encoding='utf-8') as f:
            cls.c = generate_multiplier4x4(load_cell_library(f.read()))
        cls.p = load_device_params()
        cls.settings = AnalysisSettings.from_config(Config())
        cls.reports = {s: run_strategy(cls.c, s, cls.p, cls.settings) for s in Strategies.all_types()}

    def test_settings_from_config(self):
        self.assertEqual(self.settings.vth, 0.01)
        self.assertEqual(self.settings.word, "1000")
        self.assertEqual(self.settings.n_rows, 7)
        self.assertEqual(AnalysisSettings().effective_vth(self.p), self.p.vth)

    def test_reports_are_consistent(self):
        for strategy, report in self.reports.items():
            report.check_consistency()
            self.assertEqual(report.strategy, strategy)
            self.assertGreater(report.delay, report.d0, strategy)
            self.assertTrue(math.isclose(report.d0, 2.387915e-10, rel_tol=1e-6))
            self.assertTrue(math.isclose(report.d_bc, 2.667e-10, rel_tol=1e-3))

    def test_conventional(self):
        r = self.reports[Strategies.CONVENTIONAL]
        self.assertEqual(list(r.widths), ['all'])
        self.assertTrue(math.isclose(r.widths['all'], 700 * NM, rel_tol=1e-12))
        self.assertEqual(r.delay, r.d_bc)
        self.assertEqual([v.name for v in r.verdicts], ['ir_drop'])
        self.assertTrue(r.passed)

    def test_cbstd(self):
        r = self.reports[Strategies.CBSTD]
        self.assertEqual(sorted(r.widths), ['critical', 'nc0'])
        self.assertTrue(math.isclose(r.widths['critical'], 135 * NM, rel_tol=1e-12))
        self.assertTrue(math.isclose(r.delay, 2.8652e-10, rel_tol=1e-3))
        self.assertLessEqual(r.delay, 1.10 * r.d_bc)
        # 只按延迟预算选宽，关键簇 vST 超过 10% Vdd
        verdicts = {v.name: v.passed for v in r.verdicts}
        self.assertEqual(verdicts, {"ir_drop": False, "delay_budget": True})
        self.assertFalse(r.passed)

    def test_dstn(self):
        r = self.reports[Strategies.DSTN]
        self.assertEqual(sorted(r.widths), [f"row{k}" for k in range(7)])
        for width in r.widths.values():
            self.assertTrue(math.isclose(width, 270 * NM, rel_tol=1e-12))
        self.assertIsNotNone(r.rail)
        self.assertTrue(r.passed)

    def test_tunable(self):
        r = self.reports[Strategies.TUNABLE]
        self.assertEqual(r.word, "1000")
        self.assertTrue(math.isclose(r.widths['critical'], 540 * NM, rel_tol=1e-12))
        # 270 nm 的非关键簇 vST ≈ 0.145 V
        verdicts = {v.name: v for v in r.verdicts}
        self.assertFalse(verdicts["ir_drop"].passed)
        self.assertIn("nc0", verdicts["ir_drop"].detail)
        self.assertTrue(verdicts["delay_budget"].passed)
        wider = run_strategy(self.c, 'tunable', self.p, with_overrides(self.settings, nc_width=700 * NM))
        self.assertTrue(wider.passed)
        self.assertLessEqual(wider.max_vst, 0.1)
        faster = run_strategy(self.c, 'tunable', self.p, self.settings, word="1111")
        self.assertLess(faster.delay, r.delay)

    def test_ir_verdict_covers_reported_max_vst(self):
        """IR 判定与报告中的 max_vst 一致"""
        for strategy in (Strategies.CONVENTIONAL, Strategies.CBSTD, Strategies.TUNABLE):
            r = self.reports[strategy]
            ir = next(v for v in r.verdicts if v.name == "ir_drop")
            self.assertEqual(ir.passed, r.max_vst <= 0.1 * self.p.vdd, strategy)

    def test_model_selection_differs_from_table_selection(self):
        """模型按延迟预算选出 135 nm，参考表数据选出 400 nm"""
        lines = {line.name: line for line in verify_paper_tables(load_paper_dataset()).lines}
        self.assertEqual(lines["cbstd table selection"].computed, "400nm")
        self.assertTrue(math.isclose(self.reports[Strategies.CBSTD].widths['critical'], 135 * NM,
                                     rel_tol=1e-12))

    def test_candidate_override_can_be_infeasible(self):
        with self.assertRaises(InfeasibleError):
            run_strategy(self.c, 'conv', self.p, self.settings, candidates=(135 * NM,))

    def test_unknown_strategy(self):
        with self.assertRaises(ValueError):
            run_strategy(self.c, 'mtcmos', self.p, self.settings)

    def test_tampered_report_fails_consistency(self):
        r = run_strategy(self.c, 'cbstd', self.p, self.settings)
        r.derived['shift_from_dbc_pct'] += 1.0
        with self.assertRaises(ReportError):
            r.check_consistency()

    def test_compare_strategies(self):
        rows = compare_strategies(self.c, self.p, self.settings)
        self.assertEqual([row['strategy'] for row in rows], ['ungated'] + get_supported_strategies())
        self.assertEqual(rows[0]['delay_s'], self.reports["conventional"].d0)
        self.assertTrue(math.isclose(rows[0]['p_avg_w'], 1.386176e-5, rel_tol=1e-6))
        statuses = {row['strategy']: row['status'] for row in rows[1:]}
        self.assertEqual(statuses, {'conventional': ReportConstants.PASS, 'cbstd': ReportConstants.FAIL,
                                    'dstn': ReportConstants.PASS, 'tunable': ReportConstants.FAIL})
        for row in rows[1:]:
            self.assertLess(row['p_avg_w'], rows[0]['p_avg_w'])

    def test_compare_marks_infeasible_rows(self):
        tight = with_overrides(self.settings, conventional_candidates=(135 * NM,))
        with self.assertRaises(InfeasibleError):
            compare_strategies(self.c, self.p, tight)

        strict = with_overrides(self.settings, dstn_candidates=(135 * NM,))
        rows = {row['strategy']: row for row in compare_strategies(self.c, self.p, strict)}
        self.assertEqual(rows['dstn']['status'], ReportConstants.INFEASIBLE)
        self.assertIsNone(rows['dstn']['delay_s'])
        self.assertEqual(rows['tunable']['status'], ReportConstants.FAIL)

    def test_with_overrides_ignores_none(self):
        changed = with_overrides(self.settings, n_rows=3, word=None)
        self.assertEqual(changed.n_rows, 3)
        self.assertEqual(changed.word, self.settings.word)
        self.assertEqual(self.settings.n_rows, 7)


class TestPublicApi(unittest.TestCase):
    """包级便捷函数"""

    def setUp(self):
        set_config(Config())

    def test_default_library(self):
        lib = default_library()
        self.assertIn('AND2_CTRL', lib)
        self.assertEqual(len(generate_multiplier4x4(lib).gates), 28)

    def test_analyze(self):
        text = write_netlist(generate_multiplier4x4(default_library()))
        report = analyze(text, 'tunable', word='1000')
        self.assertEqual(report.word, '1000')
        self.assertTrue(math.isclose(report.p_avg, 1.323864e-5, rel_tol=1e-4))


if __name__ == '__main__':
    unittest.main()
