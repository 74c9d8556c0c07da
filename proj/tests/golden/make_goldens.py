#!/usr/bin/env python3
"""Regenerate the rendered-prompt goldens from the template store.

Reads the store with a YAML parser, substitutes {{name}} placeholders with
plain string replacement and writes <key>.system.txt / <key>.user.txt next
to this file. Independent of the C++ renderer on purpose.
"""

import json
import pathlib

import yaml

HERE = pathlib.Path(__file__).resolve().parent
STORE = HERE.parent.parent / "core" / "data" / "prompt_templates.yaml"


def main():
    templates = yaml.safe_load(STORE.read_text(encoding="utf-8"))
    bindings = json.loads((HERE / "bindings.json").read_text(encoding="utf-8"))
    for key, tmpl in templates.items():
        user = tmpl["user"]
        for name, value in bindings[key].items():
            user = user.replace("{{" + name + "}}", value)
        (HERE / f"{key}.system.txt").write_text(tmpl["system"], encoding="utf-8", newline="")
        (HERE / f"{key}.user.txt").write_text(user, encoding="utf-8", newline="")


if __name__ == "__main__":
    main()
