"""Shared fixtures: reference parameter set, its interior equilibria, and a
config-file factory plus an in-process CLI runner."""

import json

import pytest

from keendelay import delay_spectrum as ds
from keendelay import equilibria as eqm
from keendelay import linearize as lin
from keendelay.cli_app import main as cli_main
from keendelay.model_core import ModelParams

# the worked reference constants used throughout the suite
REF_KW = dict(
    alpha=0.025,
    beta=0.02,
    delta=0.01,
    nu=3.0,
    r=0.03,
    gamma=0.8,
    eta_p=1.4,
    xi=1.2,
    phi0=0.04340277,
    phi1=0.00006944,
    kappa0=-0.0065,
    kappa1=-5.0,
    kappa2=20.0,
)


@pytest.fixture(scope="session")
def ref_params():
    return ModelParams(**REF_KW)


@pytest.fixture(scope="session")
def e4_pair(ref_params):
    out = eqm.find_e4(ref_params)
    assert len(out) == 2
    return out


@pytest.fixture(scope="session")
def eq_stable(e4_pair):
    # larger wage share; the branch that passes the zero-delay test
    return e4_pair[1]


@pytest.fixture(scope="session")
def eq_unstable(e4_pair):
    return e4_pair[0]


@pytest.fixture(scope="session")
def k_stable(ref_params, eq_stable):
    return lin.k_constants(ref_params, eq_stable)


@pytest.fixture(scope="session")
def crossing(k_stable):
    roots, case = ds.positive_roots(ds.hz_coefficients(k_stable))
    assert case == "turning-point-test"
    return ds.critical_delays(k_stable, roots)


def base_config_doc():
    """Config document matching the bundled reference file."""
    return {
        "model": dict(REF_KW),
        "analysis": {
            "tau": 0.0,
            "dt": 0.01,
            "t_end": 500.0,
            "initial": [0.837, 0.968, 0.064],
            "j_max": 3,
            "newton": {
                "re_min": -3.0,
                "re_max": 1.0,
                "im_min": 0.0,
                "im_max": 12.0,
                "nx": 40,
                "ny": 40,
            },
            "tol": {"residual": 1e-9, "root": 1e-10},
        },
        "output": {"dir": "out", "svg": False},
    }


@pytest.fixture()
def write_config(tmp_path):
    """Writes a config file into tmp_path and returns its path as str.

    overrides maps dotted paths to values, e.g. {"analysis.tau": 0.85}.
    """

    def _write(name="config.json", **dotted):
        doc = base_config_doc()
        doc["output"]["dir"] = str(tmp_path / "out")
        for path, value in dotted.items():
            node = doc
            keys = path.split(".")
            for key in keys[:-1]:
                node = node.setdefault(key, {})
            node[keys[-1]] = value
        target = tmp_path / name
        target.write_text(json.dumps(doc))
        return str(target)

    return _write


@pytest.fixture()
def run_cli(capsys):
    """Invokes the CLI in-process, returning (exit code, stdout, stderr)."""

    def _run(*argv):
        code = cli_main(list(argv))
        cap = capsys.readouterr()
        return code, cap.out, cap.err

    return _run
