//! Node counts frozen from CPython 3.10:
//! `sum(isinstance(n, ast.stmt) for n in ast.walk(ast.parse(src)))` and the
//! same for `ast.expr`.

use dspipe_pyast::{count_nodes, parse_module};

const CASES: &[(&str, &str, usize, usize)] = &[
    (
        "fstrings",
        r#"x = f"a{b!r:>{w}}c" "d"
y = f"{y=}"
z = f"{a:{b}.{c}f}" f'{d["k"]}'
q = f"{ {1:2}[1] }"
"#,
        4,
        38,
    ),
    (
        "walrus_comp",
        r#"if (n := len(a)) > 10:
    print([y for x in data if (y := f(x)) is not None])
"#,
        2,
        20,
    ),
    (
        "decorators_lambda",
        r#"@dec(1)
@other.attr
def f(a, b=lambda x: x + 1, *, c: int = 3) -> None:
    return (yield from g())
"#,
        2,
        15,
    ),
    (
        "async",
        r#"async def main():
    async with a as b, c:
        async for i in aiter():
            await asyncio.sleep(i)
    return [x async for x in y]
"#,
        5,
        15,
    ),
    (
        "match",
        r#"match cmd.split():
    case ["go", direction] | ["move", direction]:
        go(direction)
    case {"x": 1, **rest}:
        pass
    case Point(x=0, y=-1.5) as p if p:
        pass
    case -1 + 2j:
        pass
    case _:
        pass
"#,
        6,
        19,
    ),
    (
        "slices_star",
        r#"a[1:2, ::3, ...] = b
x, *y = z
print(*args, **kw, sep="")
del a[0], b.c
"#,
        4,
        26,
    ),
    (
        "try_class",
        r#"class A(B, metaclass=M):
    x: int = 1
    def m(self): ...
try:
    pass
except (E, F) as e:
    raise X from e
else:
    pass
finally:
    assert q, "m"
"#,
        9,
        13,
    ),
    (
        "misc",
        r#"global g
x = 1 if a else 2 if b else 3
y = not a and b or c
z = {**a, "b": 1}
s = {1, 2, *t}
w = -x ** 2
v = a @ b // c % d << e >> f & g ^ h | i
with (open(p) as f):
    pass
import a.b as c, d
from ..x import (y as z, w)
from . import *
while 1:
    break
else:
    continue
"#,
        15,
        54,
    ),
    (
        "strings",
        r#"a = "x" 'y' """z"""
b = b"a" b'b'
c = r"\d+" u"u"
d = ("implicit"
     "join")
"#,
        4,
        8,
    ),
    (
        "nested_calls",
        r#"model.fit(X_train, y_train, validation_data=(X_val, y_val), callbacks=[EarlyStopping(patience=3)])
df = pd.read_csv("a.csv").dropna().reset_index(drop=True)
out = Dense(10)(Flatten()(x))
"#,
        3,
        31,
    ),
];

#[test]
fn counts_match_cpython() {
    for (name, src, stmts, exprs) in CASES {
        let module = parse_module(src).unwrap_or_else(|e| panic!("{name}: {e}"));
        let c = count_nodes(&module);
        assert_eq!((c.stmts, c.exprs), (*stmts, *exprs), "{name}");
    }
}

#[test]
fn syntax_errors_are_rejected() {
    for src in [
        "print 'py2'\n",
        "def f(:\n    pass\n",
        "x = (1, 2\n",
        "if x\n    y\n",
        "  x = 1\n",
        "f'{}'\n",
        "exec 'code'\n",
        "a = 1 +\n",
    ] {
        assert!(parse_module(src).is_err(), "{src:?}");
    }
}
