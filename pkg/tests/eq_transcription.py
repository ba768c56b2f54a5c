"""Hand transcription of the printed three-setting witness.

Terms are listed as in print: six-body words, then the fifteen lower-order
patterns with weight 3 or 5 (in 1/576 units), their identity/Pauli
complements added with the same sign for x, y and the opposite sign for z.
"""

from fractions import Fraction

# "s" marks the Pauli letter, "1" the identity
PATTERNS = [
    ("ss1111", 3), ("s1s111", 3), ("1ss111", 3), ("111ss1", 3), ("ss1ss1", 5), ("s1sss1", 5),
    ("1ssss1", 5), ("111s1s", 3), ("ss1s1s", 5), ("s1ss1s", 5), ("1sss1s", 5), ("1111ss", 3),
    ("ss11ss", 5), ("s1s1ss", 5), ("1ss1ss", 5),
]


def printed_terms() -> dict:
    terms = {"IIIIII": Fraction(181, 576)}
    six = {"X": Fraction(-1, 64), "Y": Fraction(-1, 64), "Z": Fraction(1, 64)}
    for letter, c in six.items():
        terms[letter * 6] = c
    for letter in "XYZ":
        for pattern, weight in PATTERNS:
            word = pattern.replace("s", letter).replace("1", "I")
            swapped = pattern.translate(str.maketrans("s1", "1s")).replace("s", letter).replace("1", "I")
            terms[word] = terms.get(word, 0) - Fraction(weight, 576)
            sign = -1 if letter == "Z" else 1
            terms[swapped] = terms.get(swapped, 0) - sign * Fraction(weight, 576)
    return terms


def printed_text() -> str:
    return "".join(f"{c}  {w}\n" for w, c in sorted(printed_terms().items()))
