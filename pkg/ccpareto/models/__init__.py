from ccpareto.models.results import RunResult, SummaryRow
