"""Convenience functions for showing user facing options and their descriptions."""

from cogent3.core.table import Table, make_table

from lorprod.family._forms import FormType


def available_forms() -> Table:
    """Return a table showing the analytic forms accepted for rho, h and g."""
    data: dict[str, list[str]] = {"Form": [], "Description": []}

    for form_type in FormType:
        data["Form"].append(form_type.value)
        data["Description"].append(form_type.description)

    table = make_table(data=data, title="Available analytic forms")
    table.set_repr_policy(head=table.shape[0])
    return table
