"""Accuracy/timing comparison table built from training report rows."""
from __future__ import annotations

from dataclasses import dataclass

from .exceptions import NetPriceError


class NoSuccessfulRows(NetPriceError):
    pass


@dataclass(frozen=True)
class ComparisonRow:
    algorithm: str
    validator: str
    r2: float
    rmse: float
    fit_time: float
    best_params: dict

    @property
    def label(self) -> str:
        return f"{self.algorithm}/{self.validator}"


def _rankings(rows: list[ComparisonRow]) -> dict:
    # sorted() is stable, so exact ties keep input order.
    by_r2 = sorted(rows, key=lambda r: (-r.r2, r.rmse))
    by_rmse = sorted(rows, key=lambda r: r.rmse)
    by_time = sorted(rows, key=lambda r: r.fit_time)
    return {
        "accuracy_r2": [r.label for r in by_r2],
        "accuracy_rmse": [r.label for r in by_rmse],
        "time": [r.label for r in by_time],
        "best_by_r2": by_r2[0].label,
        "best_by_rmse": by_rmse[0].label,
        "fastest": by_time[0].label,
    }


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]
    failed: tuple[str, ...] = ()

    @classmethod
    def from_report_rows(cls, rows: list[dict]) -> "ComparisonReport":
        ok, failed = [], []
        for row in rows:
            if row.get("status", "ok") != "ok":
                failed.append(f"{row.get('algorithm')}/{row.get('validator')}")
                continue
            ok.append(ComparisonRow(row["algorithm"], row["validator"], float(row["test_r2"]),
                                    float(row["test_rmse"]), float(row["fit_time"]),
                                    dict(row.get("best_params", {}))))
        if not ok:
            raise NoSuccessfulRows("no successful model rows to compare")
        return cls(tuple(ok), tuple(failed))

    def rankings(self) -> dict:
        return _rankings(list(self.rows))

    def rankings_by_validator(self) -> dict:
        out = {}
        for validator in dict.fromkeys(r.validator for r in self.rows):
            subset = [r for r in self.rows if r.validator == validator]
            ranks = _rankings(subset)
            # Within one validator the algorithm name alone is unambiguous.
            out[validator] = {k: ([s.split("/")[0] for s in v] if isinstance(v, list)
                                  else v.split("/")[0]) for k, v in ranks.items()}
        return out

    def to_dict(self) -> dict:
        return {
            "rows": [{"algorithm": r.algorithm, "validator": r.validator, "r2": r.r2,
                      "rmse": r.rmse, "fit_time": r.fit_time, "best_params": r.best_params}
                     for r in self.rows],
            "failed": list(self.failed),
            "rankings": self.rankings(),
            "rankings_by_validator": self.rankings_by_validator(),
        }

    def to_text(self) -> str:
        header = ("Algorithm", "Validator", "R²", "RMSE", "Fit time (s)")
        body = [(r.algorithm, r.validator, f"{r.r2:.4f}", f"{r.rmse:.4f}", f"{r.fit_time:.2f}")
                for r in self.rows]
        widths = [max(len(row[i]) for row in [header] + body) for i in range(len(header))]
        align = ["<", "<", ">", ">", ">"]

        def fmt(cells):
            return "  ".join(f"{c:{a}{w}}" for c, a, w in zip(cells, align, widths)).rstrip()

        lines = [fmt(header), "  ".join("-" * w for w in widths)]
        lines.extend(fmt(row) for row in body)
        ranks = self.rankings()
        lines.append("")
        lines.append("Accuracy by R² (best first):   " + " > ".join(ranks["accuracy_r2"]))
        lines.append("Accuracy by RMSE (best first): " + " > ".join(ranks["accuracy_rmse"]))
        lines.append("Fit time (fastest first):      " + " < ".join(ranks["time"]))
        lines.append(f"Lowest RMSE: {ranks['best_by_rmse']}   Highest R²: {ranks['best_by_r2']}")
        if self.failed:
            lines.append("Failed: " + ", ".join(self.failed))
        return "\n".join(lines) + "\n"


def compare(rows: list[dict]) -> ComparisonReport:
    return ComparisonReport.from_report_rows(rows)
