from markov_interp.cli import CLIOptions
from markov_interp.core.presets import apply_preset, find_preset, load_presets


def test_load_presets_from_list_and_mapping():
    listed = {"presets": [{"name": "a", "args": {"eta": 0.1}}]}
    mapped = {"presets": {"a": {"eta": 0.1}}}
    assert load_presets(listed) == load_presets(mapped)
    assert load_presets({}) == []
    assert load_presets({"presets": "oops"}) == []


def test_find_preset():
    config = {"presets": [{"name": "fast", "args": {"method": "lsq"}}, {"name": "x"}]}
    assert find_preset(config, "fast") == {"method": "lsq"}
    assert find_preset(config, "x") == {}
    assert find_preset(config, "missing") is None


def test_apply_preset_to_options():
    args = CLIOptions(command="interpolate", method="oneshot")
    apply_preset({"method": "nystrom", "mode": "standard", "unknown": 1}, args)
    assert args.method == "nystrom"
    assert args.mode == "standard"
    assert not hasattr(args, "unknown")


def test_apply_preset_to_dict():
    data = {"eta": None}
    assert apply_preset({"eta": 0.5, "bandwidth": 4}, data) == {
        "eta": 0.5,
        "bandwidth": 4,
    }
