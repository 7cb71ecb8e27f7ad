# Copyright 2026 The FuzzSplore Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Validates JSON documents against the shipped schemas.

usage: validate_schemas.py SCHEMA_DIR SCHEMA_NAME=FILE...
"""

import json
import pathlib
import sys

import jsonschema


def main(argv):
    schema_dir = pathlib.Path(argv[1])
    failures = 0
    for arg in argv[2:]:
        name, path = arg.split("=", 1)
        schema = json.loads((schema_dir / f"{name}.schema.json").read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        validator = jsonschema.Draft202012Validator(schema)
        doc = json.loads(pathlib.Path(path).read_text())
        for err in validator.iter_errors(doc):
            failures += 1
            loc = "/".join(str(p) for p in err.absolute_path)
            print(f"{path}: /{loc}: {err.message}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
