"""Config grammar, schema strictness and shape-chain validation."""

import pytest

from spectralnn.config import load_config, parse_config_text
from spectralnn.errors import ConfigError

MINIMAL_FREQUENCY = """
[network]
variant = frequency
dataset = mnist
pyramidal = true

[optimizer]
iterations = 100

[data]
root = /data/mnist
"""

MINIMAL_SPATIAL = """
[network]
variant = spatial
dataset = mnist

[data]
root = /data/mnist
"""


class TestGrammar:
    def test_minimal_config_parses_with_defaults(self):
        cfg = parse_config_text(MINIMAL_FREQUENCY)
        assert cfg.variant == "frequency"
        assert cfg.pyramidal is True
        assert cfg.learning_rate == 0.01
        assert cfg.momentum == 0.9
        assert cfg.batch_size == 64
        assert cfg.iterations == 100
        assert cfg.sparse_mode == "polar"
        assert cfg.beta == pytest.approx(0.4244131815783876)

    def test_comments_and_blank_lines_ignored(self):
        cfg = parse_config_text(MINIMAL_SPATIAL + "\n# trailing comment\n")
        assert cfg.variant == "spatial"

    def test_inline_comment(self):
        text = MINIMAL_SPATIAL.replace(
            "variant = spatial", "variant = spatial  # the baseline"
        )
        assert parse_config_text(text).variant == "spatial"

    def test_empty_file_lists_required_keys(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text("")
        message = str(err.value)
        assert "network.variant" in message
        assert "network.dataset" in message
        assert "data.root" in message

    def test_duplicate_key_reports_both_lines(self):
        text = "\n".join([
            "[network]",
            "variant = spatial",
            "dataset = mnist",
            "variant = frequency",
            "[data]",
            "root = .",
        ])
        with pytest.raises(ConfigError) as err:
            parse_config_text(text, origin="dup.cfg")
        assert "dup.cfg:4" in str(err.value)
        assert "line 2" in str(err.value)

    def test_unknown_key_with_line_number(self):
        text = MINIMAL_SPATIAL + "\n[network]\n"  # reopen section
        with pytest.raises(ConfigError, match="unknown key 'alpa'"):
            parse_config_text(MINIMAL_SPATIAL.replace(
                "variant = spatial", "variant = spatial\nalpa = 1.0"
            ))

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match=r"unknown section \[misc\]"):
            parse_config_text("[misc]\nx = 1\n")

    def test_syntax_error_with_line_number(self):
        with pytest.raises(ConfigError, match=":2:"):
            parse_config_text("[network]\nvariant spatial\n", origin="x.cfg")

    def test_key_outside_section_rejected(self):
        with pytest.raises(ConfigError, match="outside"):
            parse_config_text("variant = spatial\n")

    def test_bad_value_types_rejected(self):
        with pytest.raises(ConfigError, match="batch_size"):
            parse_config_text(MINIMAL_SPATIAL + "[optimizer]\nbatch_size = many\n")
        with pytest.raises(ConfigError, match="pyramidal"):
            parse_config_text(MINIMAL_FREQUENCY.replace(
                "pyramidal = true", "pyramidal = yes"
            ))

    def test_duplicate_key_in_different_sections_allowed_by_schema_only(self):
        # 'root' exists only under [data]; placing it in [network] must fail.
        with pytest.raises(ConfigError, match="unknown key 'root'"):
            parse_config_text(MINIMAL_SPATIAL + "[network]\nroot = /x\n")


class TestApplicability:
    def test_spatial_keys_rejected_for_frequency(self):
        text = MINIMAL_FREQUENCY.replace(
            "pyramidal = true", "pyramidal = true\nconv_channels = 8"
        )
        with pytest.raises(ConfigError, match="does not apply"):
            parse_config_text(text)

    def test_frequency_keys_rejected_for_spatial(self):
        with pytest.raises(ConfigError, match="does not apply"):
            parse_config_text(MINIMAL_SPATIAL.replace(
                "dataset = mnist", "dataset = mnist\nalpha = 2.0"
            ))

    def test_att_keys_rejected_for_mnist(self):
        with pytest.raises(ConfigError, match="does not apply"):
            parse_config_text(MINIMAL_SPATIAL.replace(
                "dataset = mnist", "dataset = mnist\nimage_size = 64"
            ))

    def test_fc2_applies_only_to_mnist_spatial(self):
        att = MINIMAL_SPATIAL.replace("dataset = mnist", "dataset = att")
        with pytest.raises(ConfigError, match="does not apply"):
            parse_config_text(att + "[network]\nfc2 = 32\n")


class TestValidation:
    def test_momentum_range(self):
        with pytest.raises(ConfigError, match="momentum"):
            parse_config_text(MINIMAL_SPATIAL + "[optimizer]\nmomentum = 1.0\n")

    def test_batch_size_minimum(self):
        with pytest.raises(ConfigError, match="batch_size"):
            parse_config_text(MINIMAL_SPATIAL + "[optimizer]\nbatch_size = 1\n")

    def test_att_image_size_shape_chain(self):
        att = MINIMAL_SPATIAL.replace("dataset = mnist", "dataset = att")
        with pytest.raises(ConfigError, match="max_pool"):
            parse_config_text(att + "[network]\nimage_size = 27\n")

    def test_frequency_region_requires_size(self):
        from dataclasses import replace

        from spectralnn.config import validate_shape_chain

        att = MINIMAL_FREQUENCY.replace("dataset = mnist", "dataset = att").replace(
            "pyramidal = true", ""
        )
        cfg = parse_config_text(att)
        # Below the trunk's region threshold: a 6x6 input pools to 3x3.
        with pytest.raises(ConfigError, match="tsrelu_trunk"):
            validate_shape_chain(replace(cfg, image_size=6))

    def test_pyramid_requires_even_size(self):
        att = MINIMAL_FREQUENCY.replace("dataset = mnist", "dataset = att")
        with pytest.raises(ConfigError, match="pyramid"):
            parse_config_text(att + "[network]\nimage_size = 27\n")

    def test_overrides(self):
        cfg = parse_config_text(MINIMAL_FREQUENCY)
        other = cfg.with_overrides(seed=42, iterations=None)
        assert other.seed == 42
        assert other.iterations == cfg.iterations


class TestShippedConfigs:
    CONFIG_DIR = __import__("pathlib").Path(__file__).resolve().parent.parent / "configs"

    @pytest.mark.parametrize(
        "name",
        [
            "mnist_frequency.cfg",
            "mnist_spatial.cfg",
            "mnist_frequency_ci.cfg",
            "mnist_spatial_ci.cfg",
            "att_frequency.cfg",
            "att_spatial.cfg",
        ],
    )
    def test_parses_and_passes_shape_validation(self, name):
        # load_config runs the full schema and shape-chain validation.
        cfg = load_config(self.CONFIG_DIR / name)
        assert cfg.variant in ("spatial", "frequency")

    @pytest.mark.parametrize("name", ["mnist_frequency.cfg", "mnist_spatial.cfg"])
    def test_ten_iteration_smoke_train(self, name, synthetic_mnist):
        # The shipped architectures must train for 10 iterations as-is; the
        # synthetic IDX fixture stands in for the real files.
        from spectralnn.train import Trainer, load_datasets

        root, paths = synthetic_mnist
        cfg = load_config(self.CONFIG_DIR / name).with_overrides(
            iterations=10, batch_size=16, eval_every=10,
            data_root=str(root),
            train_images=paths["train_images"].name,
            train_labels=paths["train_labels"].name,
            test_images=paths["test_images"].name,
            test_labels=paths["test_labels"].name,
        )
        train, test = load_datasets(cfg)
        points = Trainer(cfg, train, test, log=open("/dev/null", "w")).run()
        assert points[-1].iteration == 10


class TestLoadConfig:
    def test_round_trip_from_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(MINIMAL_FREQUENCY)
        cfg = load_config(path)
        assert cfg.data_root == "/data/mnist"

    def test_missing_file_is_config_error(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.cfg")

    def test_error_origin_includes_filename(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("[network]\nwhat\n")
        with pytest.raises(ConfigError, match="bad.cfg:2"):
            load_config(path)
