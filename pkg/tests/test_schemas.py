"""CLI outputs conform to the JSON Schema documents shipped in docs/."""

import json
from pathlib import Path

import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from ratdist.cli import run

SCHEMA_DIR = Path(__file__).resolve().parent.parent / "docs" / "schemas"


def make_validator(name: str) -> Draft202012Validator:
    resources = []
    for path in SCHEMA_DIR.glob("*.json"):
        schema = json.loads(path.read_text())
        resource = Resource.from_contents(schema)
        resources.append((path.name, resource))
        resources.append((schema["$id"], resource))
    registry = Registry().with_resources(resources)
    schema = json.loads((SCHEMA_DIR / name).read_text())
    return Draft202012Validator(schema, registry=registry)


@pytest.fixture(scope="module")
def validators():
    return {
        name: make_validator(name)
        for name in (
            "command_result.json",
            "configuration.json",
            "certificate.json",
            "checkpoint.json",
        )
    }


def test_generate_output_schemas(validators):
    result, code = run(["generate", "circle", "--n", "4"])
    assert code == 0
    validators["command_result.json"].validate(result)
    validators["configuration.json"].validate(result["payload"])


def test_certify_output_schemas(validators):
    result, _ = run(["certify", "--m", "4"])
    validators["command_result.json"].validate(result)
    validators["certificate.json"].validate(result["payload"])


def test_search_output_schemas(tmp_path, validators):
    spec = {"k": 1, "numerator_bound": 1, "denominator_bound": 1, "target_size": 3}
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(json.dumps(spec))
    result, code = run(["search", "--spec", str(spec_file)])
    assert code == 0
    validators["command_result.json"].validate(result)
    validators["checkpoint.json"].validate(result["payload"])


def test_violation_and_error_results_conform(validators):
    result, code = run(["certify", "--m", "3"])
    assert code == 1
    validators["command_result.json"].validate(result)
    result2, code2 = run(["certify"])
    assert code2 == 2
    validators["command_result.json"].validate(result2)
