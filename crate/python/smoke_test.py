"""Builds the extension module and exercises it on the builtin games.

Usage: python3 python/smoke_test.py
"""

import importlib
import shutil
import subprocess
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_module() -> Path:
    subprocess.run(
        ["cargo", "build", "--release", "-p", "persuasion-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib_dir = ROOT / "target" / "release"
    for name in ("libcompeting_persuasion.so", "libcompeting_persuasion.dylib", "competing_persuasion.dll"):
        if (lib_dir / name).exists():
            return lib_dir / name
    sys.exit("built library not found in " + str(lib_dir))


def main() -> None:
    built = build_module()
    tmp = Path(tempfile.mkdtemp())
    suffix = ".pyd" if built.suffix == ".dll" else ".so"
    shutil.copy(built, tmp / ("competing_persuasion" + suffix))
    sys.path.insert(0, str(tmp))
    cp = importlib.import_module("competing_persuasion")

    ecig = cp.Game.builtin("ecig")
    assert ecig.sender_count == 2
    assert ecig.validate()["ok"] is True

    signal, value = cp.optimal_signal(ecig, 0)
    assert value == Fraction(9, 10), value
    assert cp.is_incentive_compatible(ecig, signal)
    assert cp.sender_value(ecig, 0, signal) == Fraction(9, 10)

    full = [cp.Signal.full_info(ecig, i) for i in range(2)]
    payoffs = cp.profile_payoffs(ecig, full)
    assert payoffs == {"receiver": Fraction(1), "senders": [Fraction(2, 5), Fraction(2, 5)]}, payoffs
    assert cp.check_equilibrium(ecig, full)["verdict"] == "fully-informative-consistent"

    better, trace = cp.improve(ecig, 1, signal)
    assert cp.receiver_value(ecig, better) > cp.receiver_value(ecig, signal)
    assert cp.sender_value(ecig, 1, better) > cp.sender_value(ecig, 1, signal)
    assert trace["base_action"] == "impose"

    sim = cp.simulate(ecig, 1, signal)
    assert cp.receiver_value(ecig, sim) == cp.receiver_value(ecig, signal)
    mixed = cp.mix_with_full_info(ecig, signal, Fraction(1, 4))
    assert cp.is_incentive_compatible(ecig, mixed)

    pooling = [signal, cp.Signal.constant(ecig, 1, 1)]
    report = cp.check_equilibrium(ecig, pooling)
    assert report["verdict"] == "refuted", report["verdict"]

    policy = cp.Game.builtin("policy(1/10)")
    _, v = cp.optimal_signal(policy, 0)
    assert v == 1
    knife = cp.Game.builtin("policy(0)")
    assert knife.validate()["assumption2_ok"] is False

    again = cp.Game.from_json(ecig.to_json())
    assert cp.Signal.from_json(again, signal.to_json(ecig)) == signal

    try:
        cp.improve(ecig, 1, full[0])
    except ValueError as e:
        assert "nothing to improve" in str(e)
    else:
        raise AssertionError("improving a fully informative signal must fail")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
