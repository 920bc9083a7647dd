"""Reading, writing and converting contexts: Burmeister, binary CSV, JSON."""
import fcarepo
from fcarepo import ContextFormat, FormalContext

ctx = FormalContext(
    ["Äpfel", "Birnen", "Tomaten"],
    ["süß", "rot", "Gemüse"],
    [[1, 1, 0], [1, 0, 0], [0, 1, 1]],
    name="Obst und Gemüse",
)

# %% the three encodings of one context
for fmt in ContextFormat:
    text = fcarepo.formats.serialize(ctx, fmt)
    print(f"--- {fmt.value} ---\n{text}")
    assert fcarepo.formats.parse(text, fmt) == ctx

# %% lenient reading: CRLF, lowercase x and a missing name line each give a warning
messy = "B\r\n2\r\n1\r\n\r\ng1\r\ng2\r\nm1\r\nx\r\n.\r\n"
diagnostics = []
parsed = fcarepo.parse_burmeister(messy, diagnostics)
for d in diagnostics:
    print(d)
print(fcarepo.serialize_burmeister(parsed))  # always the strict form

# %% malformed input names the offending line
try:
    fcarepo.parse_burmeister("B\n\n1\n2\n\ng1\nm1\nm2\nX\n")
except fcarepo.ParseError as exc:
    print(exc)

# %% convert works on bytes, which is what a CI job usually has
csv_bytes = fcarepo.convert(fcarepo.serialize_burmeister(ctx).encode(), "cxt", "csv")
print(csv_bytes.decode())
