"""
Discrimination discovery.
Computes the direct and redlining path-specific effects in both directions
and judges them against the threshold tau.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

from causal_model import CausalModel
from config import Config
from errors import InvalidQuery, ReportFormatError, Unidentifiable
from logger import AlertSystem
from path_effects import PathKind, PathQuery, se_direct as direct_effect, se_indirect as indirect_effect

logger = logging.getLogger(__name__)

INDETERMINATE = 'indeterminate'

REPORT_KEYS = ('se_direct_fwd', 'se_direct_rev', 'se_indirect_fwd', 'se_indirect_rev',
               'tau', 'judge_direct', 'judge_indirect', 'witnesses')

# (fwd, rev) = (SE(c+, c-), SE(c-, c+))
EffectPair = Tuple[float, float]


@dataclass(frozen=True)
class DiscoveryReport:
    """Effects in both directions, the threshold and the two judgments."""
    se_direct: EffectPair
    se_indirect: Optional[EffectPair]
    tau: float
    judge_direct: bool
    judge_indirect: Optional[bool]
    witnesses: FrozenSet[str] = field(default_factory=frozenset)

    @property
    def indeterminate(self) -> bool:
        return self.judge_indirect is None

    @property
    def discrimination_found(self) -> bool:
        return self.judge_direct or self.judge_indirect is True

    def to_dict(self) -> Dict[str, object]:
        indirect = self.se_indirect or (None, None)
        return {
            'se_direct_fwd': self.se_direct[0],
            'se_direct_rev': self.se_direct[1],
            'se_indirect_fwd': indirect[0],
            'se_indirect_rev': indirect[1],
            'tau': self.tau,
            'judge_direct': self.judge_direct,
            'judge_indirect': self.judge_indirect,
            'witnesses': ','.join(sorted(self.witnesses)),
        }

    def to_text(self) -> str:
        """Key-value lines, one per field."""
        return ''.join(f"{key}: {format_value(value)}\n" for key, value in self.to_dict().items())

    @classmethod
    def from_text(cls, text: str) -> 'DiscoveryReport':
        """Parse to_text() output. Unknown keys (e.g. repair fields) are ignored."""
        values: Dict[str, str] = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, sep, value = line.partition(':')
            if not sep:
                raise ReportFormatError(f"expected 'key: value', got {line!r}")
            values[key.strip()] = value.strip()
        missing = [key for key in REPORT_KEYS if key not in values]
        if missing:
            raise ReportFormatError(f"missing keys {missing}")

        se_direct = (_parse_float(values['se_direct_fwd']), _parse_float(values['se_direct_rev']))
        if values['se_indirect_fwd'] == INDETERMINATE:
            se_indirect = None
        else:
            se_indirect = (_parse_float(values['se_indirect_fwd']), _parse_float(values['se_indirect_rev']))
        judge_indirect = None if values['judge_indirect'] == INDETERMINATE else _parse_bool(values['judge_indirect'])
        witnesses = frozenset(name for name in values['witnesses'].split(',') if name)
        return cls(se_direct, se_indirect, _parse_float(values['tau']),
                   _parse_bool(values['judge_direct']), judge_indirect, witnesses)


def format_value(value) -> str:
    if value is None:
        return INDETERMINATE
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ReportFormatError(f"bad number {text!r}") from None


def _parse_bool(text: str) -> bool:
    if text not in ('true', 'false'):
        raise ReportFormatError(f"bad boolean {text!r}")
    return text == 'true'


def check_tau(tau: float, name: str = 'tau') -> float:
    """Reject negative, infinite and NaN thresholds."""
    if not (math.isfinite(tau) and tau >= 0):
        raise InvalidQuery(f"{name} must be a finite non-negative number, got {tau}")
    return float(tau)


def judge_effects(se_direct: EffectPair, se_indirect: Optional[EffectPair], tau: float,
                  witnesses: Iterable[str] = ()) -> DiscoveryReport:
    """
    Apply the two one-sided tests in each direction. Comparisons are strict,
    so an effect equal to tau is not discrimination.
    """
    tau = check_tau(tau)
    se_direct = (float(se_direct[0]), float(se_direct[1]))
    judge_direct = se_direct[0] > tau or se_direct[1] > tau
    if se_indirect is None:
        judge_indirect = None
    else:
        se_indirect = (float(se_indirect[0]), float(se_indirect[1]))
        judge_indirect = se_indirect[0] > tau or se_indirect[1] > tau
    return DiscoveryReport(se_direct, se_indirect, float(tau), judge_direct, judge_indirect, frozenset(witnesses))


def check_query_pair(direct: PathQuery, indirect: PathQuery):
    if direct.kind is not PathKind.DIRECT:
        raise InvalidQuery(f"Expected a direct query, got {direct}")
    if indirect.kind is not PathKind.REDLINING:
        raise InvalidQuery(f"Expected a redlining query, got {indirect}")
    if direct.protected != indirect.protected or direct.decision != indirect.decision:
        raise InvalidQuery(f"Queries disagree on C or E: {direct} vs {indirect}")


def pse_dd(model: CausalModel, direct: PathQuery, indirect: PathQuery,
           tau: Optional[float] = None) -> DiscoveryReport:
    """
    Discover direct and indirect discrimination.

    Args:
        model: causal network with CPTs
        direct: query over the direct arc C -> E
        indirect: query over the paths through the redlining set
        tau: discrimination threshold (Config.TAU when omitted)

    Returns:
        DiscoveryReport; judge_indirect is None when the indirect effect is
        unidentifiable
    """
    tau = check_tau(Config.TAU if tau is None else tau)
    check_query_pair(direct, indirect)
    c_neg, c_pos = direct.protected.negative, direct.protected.positive

    se_direct = (direct_effect(model, direct, c_neg, c_pos).value,
                 direct_effect(model, direct, c_pos, c_neg).value)
    witnesses: FrozenSet[str] = frozenset()
    try:
        se_indirect = (indirect_effect(model, indirect, c_neg, c_pos).value,
                       indirect_effect(model, indirect, c_pos, c_neg).value)
    except Unidentifiable as exc:
        se_indirect = None
        witnesses = exc.witnesses

    report = judge_effects(se_direct, se_indirect, tau, witnesses)
    logger.info(f"Effects for {indirect}: direct={report.se_direct}, indirect={report.se_indirect}")

    alerts = AlertSystem()
    for label, value in zip(('(c+,c-)', '(c-,c+)'), report.se_direct):
        if value > tau:
            alerts.discrimination_alert('Direct', label, value, tau)
    if report.indeterminate:
        alerts.indeterminate_alert(report.witnesses)
    else:
        for label, value in zip(('(c+,c-)', '(c-,c+)'), report.se_indirect):
            if value > tau:
                alerts.discrimination_alert('Indirect', label, value, tau)
    return report
