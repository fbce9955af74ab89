"""
Line-oriented text format for causal models.

    # comment
    var Race c-,c+
    var Loan e-,e+
    arc Race Loan
    cpt Race | : 0.4,0.6
    cpt Loan | c- : 0.7,0.3
    cpt Loan | c+ : 0.2,0.8

Parent values in a cpt line follow the graph's parent order (arc declaration
order). A file without cpt lines describes a graph only.
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from causal_model import CausalGraph, CausalModel, Cpt, Variable, build_model
from errors import FairPathError, ModelFormatError

logger = logging.getLogger(__name__)


def parse_model_text(text: str) -> Tuple[CausalGraph, Optional[CausalModel]]:
    """
    Parse model text.

    Returns:
        (graph, model) where model is None when the text holds no cpt lines
    """
    variables: List[Variable] = []
    arcs: List[Tuple[str, str]] = []
    rows: Dict[str, Dict[Tuple[str, ...], List[float]]] = {}
    row_lines: Dict[str, int] = {}

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(' ')
        rest = rest.strip()
        try:
            if keyword == 'var':
                name, _, labels = rest.partition(' ')
                if not labels.strip():
                    raise ModelFormatError(line_number, "var needs a name and a label list")
                variables.append(Variable(name, [label.strip() for label in labels.split(',')]))
            elif keyword == 'arc':
                parts = rest.split()
                if len(parts) != 2:
                    raise ModelFormatError(line_number, "arc needs exactly two node names")
                arcs.append((parts[0], parts[1]))
            elif keyword == 'cpt':
                child, key, probabilities = _parse_cpt_line(line_number, rest)
                table = rows.setdefault(child, {})
                if key in table:
                    raise ModelFormatError(line_number, f"duplicate row {key} for {child}")
                table[key] = probabilities
                row_lines.setdefault(child, line_number)
            else:
                raise ModelFormatError(line_number, f"unknown keyword {keyword!r}")
        except ModelFormatError:
            raise
        except FairPathError as exc:
            raise ModelFormatError(line_number, str(exc)) from exc

    graph = CausalGraph(variables, arcs)
    if not rows:
        logger.debug(f"Parsed graph with {len(variables)} variables, no CPTs")
        return graph, None

    cpts = []
    for child, table in rows.items():
        variable = graph.variable(child)
        parents = [graph.variable(parent) for parent in graph.parents(child)]
        try:
            cpts.append(Cpt.from_rows(variable, parents, table))
        except ModelFormatError:
            raise
        except FairPathError as exc:
            raise ModelFormatError(row_lines[child], str(exc)) from exc
    model = build_model(graph, cpts)
    logger.debug(f"Parsed model with {len(variables)} variables and {len(arcs)} arcs")
    return graph, model


def _parse_cpt_line(line_number: int, rest: str) -> Tuple[str, Tuple[str, ...], List[float]]:
    head, bar, tail = rest.partition('|')
    values, colon, numbers = tail.partition(':')
    child = head.strip()
    if not bar or not colon or not child:
        raise ModelFormatError(line_number, "expected 'cpt <child> | <parent values> : <probabilities>'")
    key = tuple(label.strip() for label in values.split(',')) if values.strip() else ()
    try:
        probabilities = [float(number) for number in numbers.split(',')]
    except ValueError:
        raise ModelFormatError(line_number, f"bad probability list {numbers.strip()!r}") from None
    return child, key, probabilities


def read_model_file(path: Union[str, Path]) -> Tuple[CausalGraph, Optional[CausalModel]]:
    """Read a graph (and its CPTs, when present) from a file."""
    text = Path(path).read_text()
    logger.info(f"Reading model file {path}")
    return parse_model_text(text)


def format_model(model: Union[CausalModel, CausalGraph]) -> str:
    """Render a model (or a bare graph) in the text format; floats use repr."""
    graph = model.graph if isinstance(model, CausalModel) else model
    lines = [f"var {variable.name} {','.join(variable.domain)}" for variable in graph.variables]
    lines.extend(f"arc {source} {target}" for source, target in graph.arcs)
    if isinstance(model, CausalModel):
        for name in graph.names:
            for labels, row in model.cpt(name).rows():
                probabilities = ','.join(repr(float(p)) for p in row)
                lines.append(f"cpt {name} | {','.join(labels)} : {probabilities}")
    return '\n'.join(lines) + '\n'


def write_model_file(model: Union[CausalModel, CausalGraph], path: Union[str, Path]):
    """Write a model in the text format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_model(model))
    logger.info(f"Wrote model file {path}")
