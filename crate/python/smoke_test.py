import cmath
import math

import folpi

graph, mult = folpi.resolve("y^2-x^3")
assert sorted(mult.values()) == [2, 3, 6], mult
assert "arrow" in graph

assert folpi.abelianization("y^2-x^3") == "Z"
assert folpi.abelianization("(y-x)*(y+x)*(y-2*x)") == "Z^3"

try:
    folpi.resolve("y^2")
except ValueError as e:
    assert "not reduced" in str(e)
else:
    raise AssertionError("non-reduced germ accepted")

y0 = cmath.rect(0.03, 1.1)
h = folpi.holonomy("linear:2/5", y0)
assert abs(h - y0 * cmath.exp(-2j * math.pi * 0.4)) < 1e-10, h

d = folpi.dulac("linear:1", 1e-3, 0.5)
assert abs(abs(d) - 1e-3) < 1e-9, d

code, text = folpi.report("pi1", "y^2-x^3")
assert code == 0 and "trefoil: true" in text
code, _ = folpi.report("resolve", "y^2")
assert code == 2

print("smoke ok")
