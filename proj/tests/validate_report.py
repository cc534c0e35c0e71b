"""Validate a solve report against the shipped JSON schema."""
import json
import sys

import jsonschema

schema_path, report_path = sys.argv[1], sys.argv[2]
with open(schema_path) as fh:
    schema = json.load(fh)
with open(report_path) as fh:
    report = json.load(fh)
jsonschema.Draft202012Validator.check_schema(schema)
jsonschema.validate(report, schema, cls=jsonschema.Draft202012Validator)
if "--expect-null-trajectory" in sys.argv and report["trajectory"] is not None:
    sys.exit("expected a null trajectory")
print("valid:", report_path)
