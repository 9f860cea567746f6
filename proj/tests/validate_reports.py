"""Validates the reports written by the CLI smoke test against schemas/."""
import json
import pathlib
import sys

import jsonschema

schemas_dir, work = map(pathlib.Path, sys.argv[1:3])
schemas = {}
for p in schemas_dir.glob("*.schema.json"):
    s = json.loads(p.read_text())
    jsonschema.Draft202012Validator.check_schema(s)
    schemas[s["$id"]] = s

checked = 0
for p in sorted(work.iterdir()):
    try:
        doc = json.loads(p.read_text())
    except (json.JSONDecodeError, UnicodeDecodeError):
        continue  # csv output
    if "schema" not in doc:
        continue  # input fixtures
    schema = schemas.get(doc.get("schema"))
    if schema is None:
        sys.exit(f"{p.name}: unknown schema {doc.get('schema')!r}")
    jsonschema.validate(doc, schema, cls=jsonschema.Draft202012Validator)
    checked += 1
if checked < 10:
    sys.exit(f"only {checked} reports found in {work}")
print(f"{checked} reports valid")
