import csv
import json
import os

import pytest

from conglobe.cli import run
from conglobe.config import CONFIG_ENV
from conglobe.measure import save_trace, synthesize_trace


@pytest.fixture(autouse=True)
def no_model_file(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV, raising=False)


def read_csv(path):
    with open(path, newline='') as f:
        return list(csv.reader(f))


def test_kinematics_table(tmp_path, capsys):
    out = str(tmp_path / 'kin.csv')
    assert run(['kinematics', '--range', '85:110:0.25', '-o', out]) == 0
    rows = read_csv(out)
    assert rows[0] == ['theta2_deg', 'theta1_deg', 'theta3_deg']
    assert len(rows) == 102
    assert float(rows[1][0]) == 85.0
    assert float(rows[-1][0]) == 110.0
    assert '[i] Joint curve written to' in capsys.readouterr().out


def test_motor_path(tmp_path):
    out = str(tmp_path / 'motor.csv')
    assert run(['kinematics', '--motor', '--range', '90:110:5', '-o', out]) == 0
    assert read_csv(out)[0] == ['theta2_deg', 'theta1_deg', 'z_mm']


def test_output_is_deterministic(tmp_path):
    a, b = str(tmp_path / 'a.csv'), str(tmp_path / 'b.csv')
    assert run(['trigger', '--range', '90:110:1', '-o', a]) == 0
    assert run(['trigger', '--range', '90:110:1', '-o', b]) == 0
    with open(a, 'rb') as fa, open(b, 'rb') as fb:
        assert fa.read() == fb.read()
    assert len(read_csv(a)) == 1 + 21 * 3


def test_work_report_on_stdout(capsys):
    assert run(['work', '--psi', '0']) == 0
    report = json.loads(capsys.readouterr().out)
    summary, = report['activation']
    assert summary['psi_deg'] == 0.0
    assert summary['work_mJ_closed_form'] == pytest.approx(0.23, rel=0.10)


def test_collide_with_bench_work(capsys):
    assert run(['collide', '--speed', '0.3', '--work-source', 'value:2']) == 0
    report = json.loads(capsys.readouterr().out)
    assert report['activates'] is True
    assert report['final_state'] == 'folded'
    assert report['required_work_mJ'] == 2.0
    assert report['min_activation_speed_m_s'] == pytest.approx(0.2795, rel=0.01)


def test_collide_below_threshold(capsys):
    assert run(['collide', '--speed', '0.25', '--work-source', 'value:2']) == 0
    assert json.loads(capsys.readouterr().out)['activates'] is False


def test_usage_errors(capsys):
    assert run([]) == 2
    assert run(['collide']) == 2
    assert run(['collide', '--speed', '1', '--work-source', 'guess']) == 2
    assert run(['--help']) == 0
    capsys.readouterr()


def test_double_contact_is_an_error(tmp_path, capsys):
    assert run(['force', '--psi', '-42', '-o', str(tmp_path / 'f.csv')]) == 1
    err = capsys.readouterr().err
    assert err.startswith('error: DoubleContact: ')
    assert len(err.strip().splitlines()) == 1
    assert not os.path.exists(str(tmp_path / 'f.csv'))


def test_bad_override(capsys):
    assert run(['-s', 'wingspan_mm=3', 'work']) == 1
    assert 'ConfigError' in capsys.readouterr().err


def test_missing_model_file(tmp_path, capsys):
    assert run(['-c', str(tmp_path / 'absent.conf'), 'work']) == 1
    assert 'ConfigError' in capsys.readouterr().err


def test_model_file_from_environment(tmp_path, monkeypatch, capsys):
    path = tmp_path / 'heavy.conf'
    path.write_text('thrust_N = 1.04\n')
    monkeypatch.setenv(CONFIG_ENV, str(path))
    assert run(['work', '--psi', '0']) == 0
    report = json.loads(capsys.readouterr().out)
    assert report['thrust_N'] == 1.04
    assert report['activation'][0]['work_mJ_closed_form'] == pytest.approx(0.46, rel=0.10)


def test_calibrate_writes_model(tmp_path):
    out = str(tmp_path / 'fitted.conf')
    assert run(['calibrate', '--anchor', '90:10', '--anchor', '110:10.643', '-o', out]) == 0
    text = open(out).read()
    assert 'link_angle_a34_deg = 84.96' in text
    assert run(['-c', out, 'work', '--psi', '0']) == 0


def test_sweep_table(tmp_path):
    out = str(tmp_path / 'sweep.csv')
    assert run(['sweep', '--param', 'h_mm=2.5:10:2.5', '-o', out]) == 0
    rows = read_csv(out)
    assert len(rows) == 5
    assert [float(row[rows[0].index('h_mm')]) for row in rows[1:]] == [2.5, 5.0, 7.5, 10.0]


def test_sweep_search(capsys):
    assert run(['sweep', '--param', 'd_mm=20:40:10', '--objective', 'min_work']) == 0
    report = json.loads(capsys.readouterr().out)
    assert report['d_mm'] == 20.0
    assert report['objective'] == 'min_work'


def test_scale_report(capsys):
    assert run(['scale', '--factor', '2']) == 0
    report = json.loads(capsys.readouterr().out)
    for key in ('f_activation_N', 'w_activation_mJ', 'v_min_m_s'):
        assert report['recomputed'][key] == pytest.approx(report['predicted'][key], rel=0.01)


def test_ingest(tmp_path, model, capsys):
    traces = tmp_path / 'bench'
    traces.mkdir()
    for i, psi in enumerate((0.0, 20.0)):
        trace = synthesize_trace(model.trigger, model.linkage, model.robot, psi, seed=i)
        save_trace(trace, str(traces / ('push%d.csv' % i)))
    out = str(tmp_path / 'comparison.csv')
    assert run(['ingest', str(traces), '--report', out, '-j', '2']) == 0
    rows = read_csv(out)
    assert rows[0][0] == 'psi_deg'
    assert len(rows) == 3
    assert all(row[-1] == 'false' for row in rows[1:])
    assert 'Found 2 force traces' in capsys.readouterr().out


def test_ingest_needs_a_directory(tmp_path, capsys):
    assert run(['ingest', str(tmp_path / 'absent')]) == 1
    assert 'ConfigError' in capsys.readouterr().err


def test_report_directory(tmp_path):
    out = str(tmp_path / 'report')
    assert run(['report', '--figures', '--yaw-step', '40', '-o', out]) == 0
    names = sorted(os.listdir(out))
    for name in ('kinematics', 'trigger', 'force', 'dataset', 'collide'):
        assert name + '.csv' in names
        assert name + '.svg' in names
    with open(os.path.join(out, 'work.json')) as f:
        summaries = json.load(f)['activation']
    assert [s['psi_deg'] for s in summaries] == [-35.0, 5.0, 45.0]
    with open(os.path.join(out, 'kinematics.svg')) as f:
        assert f.read().startswith('<svg')
