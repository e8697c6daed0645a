"""
Driving the command line from Python
====================================

"""

import io
import json

from dynzsig import cli

# same as: dynzsig zsig --map "(z^2+z)" --alpha 1/2 -N 10
cfg, args = cli.parse_args(["zsig", "--map", "(z^2+z)", "--alpha", "1/2", "-N", "10"])
buf = io.StringIO()
code = cli.run(cfg, args, buf)
doc = json.loads(buf.getvalue())
print(code, doc["schema_version"], doc["result"]["zsigmondy_set"])

# CSV is available for tabular commands
cfg, args = cli.parse_args(["verify", "tailcycle", "--map", "z^2+1", "--alpha", "0", "--format", "csv"])
cli.run(cfg, args)
