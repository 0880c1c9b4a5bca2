from .ast import *  # noqa: F401,F403
from .builtins import MissingDigits, builtin_relation, numeral_of, numeral_value, numeral_word
from .compiler import (
    ArityMismatch,
    CompiledRelation,
    CompileError,
    Compiler,
    Environment,
    UnboundName,
    compile_formula,
    compile_text,
    decide_sentence,
)
from .parser import SyntaxError, parse_formula, parse_term
from .ws1s import UnsupportedAtom, export_ws1s

compile = compile_formula  # noqa: A001
