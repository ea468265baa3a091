#!/usr/bin/env python3
# Copyright 2026 The Fairshuffle Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Runs the CLI on each config and validates every JSON report it writes."""

import argparse
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
import referencing

REPORTS = ("plan", "budget", "count_report", "rates", "decisions", "risk")


def load_registry(schema_dir):
    resources = []
    for path in sorted(schema_dir.glob("*.schema.json")):
        contents = json.loads(path.read_text())
        resources.append((contents["$id"], referencing.Resource.from_contents(contents)))
    return referencing.Registry().with_resources(resources)


def validate_dir(out_dir, schema_dir, registry):
    errors = []
    for name in REPORTS:
        if not (out_dir / f"{name}.json").exists():
            errors.append(f"{name}.json missing")
    for report in sorted(out_dir.glob("*.json")):
        schema_path = schema_dir / f"{report.stem}.schema.json"
        if not schema_path.exists():
            errors.append(f"{report.name}: no schema")
            continue
        schema = json.loads(schema_path.read_text())
        validator = jsonschema.Draft202012Validator(schema, registry=registry)
        for err in validator.iter_errors(json.loads(report.read_text())):
            path = "/".join(str(p) for p in err.absolute_path)
            errors.append(f"{report.name}: {path}: {err.message}")
    return errors


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cli", required=True, type=pathlib.Path)
    parser.add_argument("--schemas", required=True, type=pathlib.Path)
    parser.add_argument("configs", nargs="+", type=pathlib.Path)
    args = parser.parse_args()

    registry = load_registry(args.schemas)
    failed = False
    with tempfile.TemporaryDirectory() as tmp:
        for i, config in enumerate(args.configs):
            out = pathlib.Path(tmp) / str(i)
            subprocess.run([str(args.cli), "run", "--config", str(config), "--out", str(out)],
                           check=True)
            errors = validate_dir(out, args.schemas, registry)
            for e in errors:
                print(f"{config.name}: {e}")
            failed = failed or bool(errors)
            if not errors:
                print(f"{config.name}: all reports valid")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
