#!/usr/bin/env python3
"""Checks that a mini-language program, run as `main(["hu"])`, ends with an
uncaught "Unsupported locale" error.

Exit 0: the error escapes main (interesting).
Exit 1: anything else, including syntax errors and failed static checks.
"""

import re
import sys

KEYWORDS = {"fn", "let", "return", "throw", "if"}
BUILTIN_ARITY = {"eq": 2, "concat": 2, "print": 1, "arg": 2, "error": 1}
TARGET_MESSAGE = "Unsupported locale"

TOKEN_RE = re.compile(
    r'\s*(?:(?P<string>"(?:[^"\\\n]|\\.)*")|(?P<number>[0-9]+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[(){},;=]))'
)


class Reject(Exception):
    pass


class Thrown(Exception):
    def __init__(self, value):
        super().__init__(value)
        self.value = value


class ErrorValue:
    def __init__(self, message):
        self.message = message


class ReturnSignal(Exception):
    def __init__(self, value):
        super().__init__()
        self.value = value


def tokenize(text):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise Reject("lex error")
        kind = m.lastgroup
        value = m.group(kind)
        if kind == "name" and value in KEYWORDS:
            kind = value
        elif kind == "punct":
            kind = value
        tokens.append((kind, value))
        pos = m.end()
    tokens.append(("eof", ""))
    return tokens


class Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset=0):
        return self.tokens[self.pos + offset][0]

    def take(self, kind):
        if self.peek() != kind:
            raise Reject("expected " + kind)
        value = self.tokens[self.pos][1]
        self.pos += 1
        return value

    def program(self):
        functions = []
        while self.peek() == "fn":
            functions.append(self.function())
        self.take("eof")
        return functions

    def function(self):
        self.take("fn")
        name = self.take("name")
        self.take("(")
        params = []
        if self.peek() == "name":
            params.append(self.take("name"))
            while self.peek() == ",":
                self.take(",")
                params.append(self.take("name"))
        self.take(")")
        return {"name": name, "params": params, "body": self.block()}

    def block(self):
        self.take("{")
        statements = []
        while self.peek() != "}":
            statements.append(self.statement())
        self.take("}")
        return statements

    def statement(self):
        kind = self.peek()
        if kind == "let":
            self.take("let")
            name = self.take("name")
            self.take("=")
            value = self.expression()
            self.take(";")
            return ("let", name, value)
        if kind in ("return", "throw"):
            self.take(kind)
            value = self.expression()
            self.take(";")
            return (kind, value)
        if kind == "if":
            self.take("if")
            self.take("(")
            cond = self.expression()
            self.take(")")
            return ("if", cond, self.block())
        value = self.expression()
        self.take(";")
        return ("expr", value)

    def expression(self):
        kind = self.peek()
        if kind == "string":
            raw = self.take("string")
            return ("str", bytes(raw[1:-1], "utf-8").decode("unicode_escape"))
        if kind == "number":
            return ("num", int(self.take("number")))
        name = self.take("name")
        if self.peek() != "(":
            return ("var", name)
        self.take("(")
        args = []
        if self.peek() != ")":
            args.append(self.expression())
            while self.peek() == ",":
                self.take(",")
                args.append(self.expression())
        self.take(")")
        return ("call", name, args)


def check(functions):
    arity = {}
    for f in functions:
        if f["name"] in arity or f["name"] in BUILTIN_ARITY:
            raise Reject("duplicate function " + f["name"])
        arity[f["name"]] = len(f["params"])
    if arity.get("main") != 1:
        raise Reject("main must take one parameter")

    def expr(e, scope):
        if e[0] == "var":
            if e[1] not in scope:
                raise Reject("undefined variable " + e[1])
        elif e[0] == "call":
            expected = arity.get(e[1], BUILTIN_ARITY.get(e[1]))
            if expected is None or expected != len(e[2]):
                raise Reject("bad call " + e[1])
            for a in e[2]:
                expr(a, scope)

    def block(statements, scope):
        scope = set(scope)
        for s in statements:
            if s[0] == "let":
                expr(s[2], scope)
                if s[1] in scope:
                    raise Reject("redeclared " + s[1])
                scope.add(s[1])
            elif s[0] in ("return", "throw"):
                expr(s[1], scope)
            elif s[0] == "if":
                expr(s[1], scope)
                block(s[2], scope)
            else:
                if s[1][0] != "call":
                    raise Reject("expression statement must be a call")
                expr(s[1], scope)

    for f in functions:
        if len(set(f["params"])) != len(f["params"]):
            raise Reject("duplicate parameter")
        block(f["body"], f["params"])
        if f["name"] != "main":
            body = f["body"]
            if not body or body[-1][0] not in ("return", "throw"):
                raise Reject("missing return in " + f["name"])


def run(functions, argv):
    table = {f["name"]: f for f in functions}
    depth = [0]

    def call(name, args):
        if name == "eq":
            return args[0] == args[1]
        if name == "concat":
            if not all(isinstance(a, str) for a in args):
                raise Reject("concat expects strings")
            return args[0] + args[1]
        if name == "print":
            return None
        if name == "arg":
            if not isinstance(args[0], list) or not isinstance(args[1], int) or not 0 <= args[1] < len(args[0]):
                raise Reject("bad arg access")
            return args[0][args[1]]
        if name == "error":
            if not isinstance(args[0], str):
                raise Reject("error expects a string")
            return ErrorValue(args[0])
        f = table[name]
        depth[0] += 1
        if depth[0] > 200:
            raise Reject("recursion too deep")
        try:
            execute(f["body"], dict(zip(f["params"], args)))
        except ReturnSignal as r:
            return r.value
        finally:
            depth[0] -= 1
        return None

    def evaluate(e, env):
        if e[0] in ("str", "num"):
            return e[1]
        if e[0] == "var":
            return env[e[1]]
        return call(e[1], [evaluate(a, env) for a in e[2]])

    def execute(statements, env):
        env = dict(env)
        for s in statements:
            if s[0] == "let":
                env[s[1]] = evaluate(s[2], env)
            elif s[0] == "return":
                raise ReturnSignal(evaluate(s[1], env))
            elif s[0] == "throw":
                value = evaluate(s[1], env)
                if not isinstance(value, ErrorValue):
                    raise Reject("throwing a non-error value")
                raise Thrown(value)
            elif s[0] == "if":
                cond = evaluate(s[1], env)
                if not isinstance(cond, bool):
                    raise Reject("condition is not a boolean")
                if cond:
                    execute(s[2], env)
            else:
                evaluate(s[1], env)

    call("main", [argv])


def main():
    with open(sys.argv[1], encoding="utf-8") as f:
        text = f.read()
    try:
        functions = Parser(tokenize(text)).program()
        check(functions)
        run(functions, ["hu"])
    except Thrown as t:
        return 0 if t.value.message == TARGET_MESSAGE else 1
    except (Reject, ReturnSignal, RecursionError):
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
