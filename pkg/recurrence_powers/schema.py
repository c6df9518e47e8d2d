"""Shared pieces of the JSON output format."""
from typing import Annotated

from pydantic import PlainSerializer

SCHEMA_VERSION = "v1"

# big integers travel through JSON as decimal strings
BigInt = Annotated[int, PlainSerializer(str, return_type=str, when_used="json")]
