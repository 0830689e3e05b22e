"""Expose a dataclass config as command-line flags."""

import argparse
import dataclasses
import typing


def parse(cls, description: str, argv=None):
    ap = argparse.ArgumentParser(description=description)
    hints = typing.get_type_hints(cls)
    for f in dataclasses.fields(cls):
        flag = "--" + f.name.replace("_", "-")
        kind = hints[f.name]
        if kind is bool:
            ap.add_argument(flag, action=argparse.BooleanOptionalAction, default=f.default)
            continue
        base = next((a for a in typing.get_args(kind) if a is not type(None)), kind)
        ap.add_argument(flag, type=base, default=f.default)
    return cls(**vars(ap.parse_args(argv)))
