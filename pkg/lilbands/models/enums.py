"""
Centralized enums for statistic families, band methods and model kinds
"""

from enum import Enum


class StatisticFamily(str, Enum):
    """Test statistic families with Monte-Carlo critical values"""
    NEW_SUP = "new-sup"                    # sup_t (nK(G_n(t),t) - C(t) - nu D(t))
    NEW_ORDERSTAT = "new-orderstat"        # max_j ((n+1)K(t_nj,U_nj) - C(t_nj) - nu D(t_nj))
    BERK_JONES = "bj"                      # n sup_t K(G_n(t),t)
    KS = "ks"                              # sqrt(n) sup_t |G_n(t) - t|
    UNION_INTERSECTION = "ui"              # min_i min{B_ni(U_ni), 1 - B_ni(U_ni)}, small is extreme
    ORDERSTAT_KL = "orderstat-kl"          # max_j (n+1)K(t_nj,U_nj), unpenalized
    LIMIT = "limit"                        # grid supremum of the Brownian bridge limit T_nu

    @property
    def uses_nu(self) -> bool:
        return self in (StatisticFamily.NEW_SUP, StatisticFamily.NEW_ORDERSTAT, StatisticFamily.LIMIT)

    @property
    def lower_tail(self) -> bool:
        """True when small values are evidence against the null"""
        return self is StatisticFamily.UNION_INTERSECTION


class BandMethod(str, Enum):
    """Confidence band constructions"""
    NEW = "new"
    BJO = "bjo"
    KS = "ks"
    UI = "ui"

    @property
    def family(self) -> StatisticFamily:
        """Statistic family whose quantile calibrates the band"""
        return _BAND_FAMILY[self]


_BAND_FAMILY = {
    BandMethod.NEW: StatisticFamily.NEW_ORDERSTAT,
    BandMethod.BJO: StatisticFamily.BERK_JONES,
    BandMethod.KS: StatisticFamily.KS,
    BandMethod.UI: StatisticFamily.UNION_INTERSECTION,
}


class CdfKind(str, Enum):
    """Hypothesized continuous distribution functions"""
    STD_NORMAL = "normal"
    UNIFORM01 = "uniform"
    GAUSS_MIXTURE = "mixture"
    TABULATED = "table"


class TailProcess(str, Enum):
    """Processes whose locally sub-exponential tails are checked by simulation"""
    BRIDGE_SQ = "bridge-sq"          # U(t)^2 / (2t(1-t)) for Brownian bridge U
    EP_SUP = "ep-sup"                # n K(G_n(t), t)
    EP_ORDERSTAT = "ep-orderstat"    # (n+1) K(t_nj, U_nj)


class OutputFormat(str, Enum):
    """Primary output encodings of the CLI"""
    CSV = "csv"
    JSON = "json"
