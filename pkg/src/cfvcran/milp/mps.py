"""MPS exchange for the planning programs.

Writes the classic sectioned format (NAME, ROWS, COLUMNS, RHS, BOUNDS,
ENDATA) with the objective row named COST, binary columns wrapped in a
MARKER INTORG/INTEND pair and additionally declared BV in BOUNDS.  Fields
are padded to fixed widths; numbers carry 17 significant digits so a
re-parse reproduces every coefficient exactly.

Names longer than 8 characters do not fit the classic field width; if any
variable or row name exceeds it, ALL columns are renamed C{id} and all rows
R{id} (an all-or-nothing fallback, so the mapping stays deterministic).
The parser reads the same subset back into an IlpModel.
"""

from __future__ import annotations

from .model import BINARY, CONTINUOUS, EQ, GE, LE, IlpModel

_SENSE_TO_TYPE = {LE: "L", GE: "G", EQ: "E"}
_TYPE_TO_SENSE = {"L": LE, "G": GE, "E": EQ}

_MARKER_BEGIN = "    MK0000    'MARKER'    'INTORG'"
_MARKER_END = "    MK0001    'MARKER'    'INTEND'"


def _names(model: IlpModel) -> tuple:
    col = [v.name for v in model.variables]
    row = [c.name for c in model.constraints]
    if any(len(n) > 8 for n in col) or any(len(n) > 8 for n in row):
        col = [f"C{i}" for i in range(len(col))]
        row = [f"R{i}" for i in range(len(row))]
    return col, row


def _num(x: float) -> str:
    return format(float(x), ".17g")


def dumps_mps(model: IlpModel, name: str = "PLAN") -> str:
    model.validate()
    col_names, row_names = _names(model)
    obj = {vid: coef for vid, coef in model.objective}

    # column-major entries, preserving declaration order of rows per column
    entries: list = [[] for _ in model.variables]
    for rid, con in enumerate(model.constraints):
        acc: dict = {}
        for vid, coef in con.terms:
            acc[vid] = acc.get(vid, 0.0) + coef
        for vid, coef in sorted(acc.items()):
            entries[vid].append((rid, coef))

    lines = [f"NAME          {name}", "ROWS", " N  COST"]
    for rid, con in enumerate(model.constraints):
        lines.append(f" {_SENSE_TO_TYPE[con.sense]}  {row_names[rid]}")

    lines.append("COLUMNS")
    in_int = False
    for vid, var in enumerate(model.variables):
        want_int = var.kind == BINARY
        if want_int and not in_int:
            lines.append(_MARKER_BEGIN)
            in_int = True
        elif not want_int and in_int:
            lines.append(_MARKER_END)
            in_int = False
        pairs = []
        if vid in obj and obj[vid] != 0.0:
            pairs.append(("COST", obj[vid]))
        pairs.extend((row_names[rid], coef) for rid, coef in entries[vid])
        for rname, coef in pairs:
            lines.append(f"    {col_names[vid]:<10}{rname:<10}{_num(coef)}")
    if in_int:
        lines.append(_MARKER_END)

    lines.append("RHS")
    for rid, con in enumerate(model.constraints):
        if con.rhs != 0.0:
            lines.append(f"    RHS       {row_names[rid]:<10}{_num(con.rhs)}")

    lines.append("BOUNDS")
    for vid, var in enumerate(model.variables):
        if var.kind == BINARY:
            lines.append(f" BV BND       {col_names[vid]}")
        else:
            if var.lb != 0.0:
                lines.append(f" LO BND       {col_names[vid]:<10}{_num(var.lb)}")
            if var.ub is not None:
                lines.append(f" UP BND       {col_names[vid]:<10}{_num(var.ub)}")

    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def write_mps(model: IlpModel, path, name: str = "PLAN") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_mps(model, name=name))


def parse_mps(text: str) -> IlpModel:
    """Read the subset emitted by dumps_mps back into a model."""
    model = IlpModel()
    section = None
    row_sense: dict = {}
    row_order: list = []
    obj_row = None
    columns: dict = {}       # name -> ordinal, in file order
    col_kind: dict = {}
    col_terms: dict = {}     # name -> list of (row, coef)
    col_obj: dict = {}
    col_bounds: dict = {}
    rhs: dict = {}
    in_int = False

    for raw in text.splitlines():
        if not raw.strip() or raw.lstrip().startswith("*"):
            continue
        if not raw.startswith(" "):
            head = raw.split()
            section = head[0]
            if section == "ENDATA":
                break
            continue
        fields = raw.split()
        if section == "ROWS":
            rtype, rname = fields[0], fields[1]
            if rtype == "N":
                if obj_row is None:
                    obj_row = rname
                continue
            row_sense[rname] = _TYPE_TO_SENSE[rtype]
            row_order.append(rname)
        elif section == "COLUMNS":
            if len(fields) >= 3 and fields[1] == "'MARKER'":
                in_int = fields[2] == "'INTORG'"
                continue
            cname = fields[0]
            if cname not in columns:
                columns[cname] = len(columns)
                col_kind[cname] = BINARY if in_int else CONTINUOUS
                col_terms[cname] = []
            for j in range(1, len(fields) - 1, 2):
                rname, value = fields[j], float(fields[j + 1])
                if rname == obj_row:
                    col_obj[cname] = col_obj.get(cname, 0.0) + value
                else:
                    col_terms[cname].append((rname, value))
        elif section == "RHS":
            for j in range(1, len(fields) - 1, 2):
                rhs[fields[j]] = float(fields[j + 1])
        elif section == "BOUNDS":
            btype, cname = fields[0], fields[2]
            if btype == "BV":
                col_kind[cname] = BINARY
                col_bounds[cname] = (0.0, 1.0)
            elif btype == "UP":
                lb = col_bounds.get(cname, (0.0, None))[0]
                col_bounds[cname] = (lb, float(fields[3]))
            elif btype == "LO":
                ub = col_bounds.get(cname, (0.0, None))[1]
                col_bounds[cname] = (float(fields[3]), ub)
            elif btype == "FX":
                col_bounds[cname] = (float(fields[3]), float(fields[3]))
            else:
                raise ValueError(f"unsupported bound type: {btype}")

    ids = {}
    for cname in columns:
        kind = col_kind[cname]
        lb, ub = col_bounds.get(cname, (0.0, None))
        if kind == BINARY:
            ids[cname] = model.add_variable(cname, BINARY)
        else:
            ids[cname] = model.add_variable(cname, CONTINUOUS, lb=lb, ub=ub)

    by_row: dict = {rname: [] for rname in row_order}
    for cname, terms in col_terms.items():
        for rname, coef in terms:
            by_row[rname].append((ids[cname], coef))
    for rname in row_order:
        model.add_constraint(rname, by_row[rname], row_sense[rname], rhs.get(rname, 0.0))
    model.set_objective(sorted(((ids[c], v) for c, v in col_obj.items())))
    model.validate()
    return model


def read_mps(path) -> IlpModel:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_mps(fh.read())
