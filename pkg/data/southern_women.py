# data/southern_women.py
"""Davis's Southern Women two-mode network (18 women x 14 events).

Incidence as tabulated by Davis, Gardner and Gardner and re-analysed by
Freeman (2003). Women are labelled 1..18 in the usual order (Evelyn first),
events E1..E14 in date order.
"""
from core.graph import BipartiteGraph

WOMEN = (
    "Evelyn", "Laura", "Theresa", "Brenda", "Charlotte", "Frances",
    "Eleanor", "Pearl", "Ruth", "Verne", "Myra", "Katherine",
    "Sylvia", "Nora", "Helen", "Dorothy", "Olivia", "Flora",
)

# one row per woman, one column per event E1..E14
ATTENDANCE = (
    "11111101100000",
    "11101111000000",
    "01111111100000",
    "10111111000000",
    "00111010000000",
    "00101101000000",
    "00001111000000",
    "00000101100000",
    "00001011100000",
    "00000011100100",
    "00000001110100",
    "00000001110111",
    "00000011110111",
    "00000110111111",
    "00000011011100",
    "00000001100000",
    "00000000101000",
    "00000000101000",
)

N_WOMEN = len(ATTENDANCE)
N_EVENTS = len(ATTENDANCE[0])


def woman_label(i: int) -> str:
    return str(i + 1)


def event_label(j: int) -> str:
    return f"E{j + 1}"


def southern_women() -> BipartiteGraph:
    triples = [
        (woman_label(i), event_label(j), 1.0)
        for i, row in enumerate(ATTENDANCE)
        for j, cell in enumerate(row)
        if cell == "1"
    ]
    return BipartiteGraph.from_triples(triples)
