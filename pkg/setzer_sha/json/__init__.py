import importlib.resources
import json
import typing

import dataclasses_json.mm
import jsonschema

T = typing.TypeVar("T")

TextFactory = typing.Callable[[], typing.ContextManager[typing.TextIO]]


class JsonFormat:
    """
    Writes JSON documents checked against a bundled JSONSchema. Keys are
    sorted so reports diff cleanly.
    """

    def __init__(self, schema):
        self._schema = schema

    def validate(self, instance):
        jsonschema.validate(instance, self._schema)

    def dump(self, open_fn: TextFactory, instance, pretty=False):
        self.validate(instance)
        with open_fn() as file:
            json.dump(instance, file, sort_keys=True, indent=2 if pretty else None)
            file.write("\n")


class DataJsonFormat(typing.Generic[T]):
    def __init__(self, format: JsonFormat, schema: dataclasses_json.mm.SchemaF):
        self._format = format
        self._dataclass_schema = schema

    def dump(self, open_fn: TextFactory, instance: T, pretty=False):
        self._format.dump(open_fn, self._dataclass_schema.dump(instance), pretty)


def package_json_format(package: str, name: str) -> JsonFormat:
    text = importlib.resources.files(package).joinpath(name).read_text()
    return JsonFormat(json.loads(text))
