#!/usr/bin/env python3
"""Build the shipped corpus fixtures deterministically.

Writes into src/sheetdoc/data/:
  - upstream_tasks.json          28 workbook names with upstream task counts
  - workbooks/<slug>.json        one seed workbook per workbook name
  - corpus.jsonl + corpus.manifest.json   111 task instances

Every generated code block is parsed, validated, and executed against its
seed workbook before it is written; the build aborts on any failure.
"""

from __future__ import annotations

import json
import random
import re
import sys
from pathlib import Path

from sheetdoc.dataset import Corpus, Manifest, TaskInstance, recount, write_corpus
from sheetdoc.engine import Sheet, Workbook, execute, load_workbook, save_workbook
from sheetdoc.xwapi import (
    column_letters,
    has_errors,
    parse_script,
    seed_catalog,
    validate_script,
)

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "sheetdoc" / "data"

# (name, upstream task count, headers, label columns, total rows)
WORKBOOKS = [
    ("Boomerang Sales", 9, ["Product", "Units Sold", "Unit Price", "Revenue"], 1, 13),
    ("Demographic Profile", 7, ["Respondent", "Age", "Household Size", "Income"], 1, 16),
    ("Dragging", 8, ["Trial", "Hanging Mass", "Acceleration", "Tension"], 1, 11),
    ("Easy GDP Breakdown", 10, ["Country", "GDP 2020", "GDP 2021", "GDP 2022"], 1, 12),
    ("Entire Shipping Costs", 16,
     ["Customers", "Seattle", "Milwaukee", "Birmingham", "Oakland"], 1, 71),
    ("Entire Summer Sales", 13, ["Product", "June", "July", "August"], 1, 14),
    ("Expense Report", 6, ["Item", "Subtotal", "Tax Rate", "Total"], 1, 9),
    ("Future Value", 7, ["Investment", "Present Value", "Annual Rate", "Years"], 1, 10),
    ("GDP Breakdown", 7, ["Country", "Agriculture", "Industry", "Services"], 1, 10),
    ("Income Statement", 5, ["Year", "Net Sales", "COGS", "Operating Expenses"], 1, 8),
    ("Income Statement 2", 9, ["Year", "Sales", "Sales Return", "Overhead"], 1, 10),
    ("Invoices", 16, ["Invoice", "Amount", "Paid", "Balance"], 1, 18),
    ("Maturity Date", 8, ["Loan", "Principal", "Length Days", "Rate"], 1, 11),
    ("Net Income", 3, ["Month", "Revenue", "Expenses"], 1, 8),
    ("Period Rate", 5, ["Investment", "Annual Rate", "Periods Per Year"], 1, 9),
    ("Present Value", 6, ["Investment", "Future Value", "Annual Rate", "Years"], 1, 9),
    ("Pricing Table", 10, ["Date", "Rolls Sold", "Price Per Roll"], 1, 13),
    ("Ramp Up And Down", 5, ["Time", "Acceleration Up", "Acceleration Down"], 0, 9),
    ("Sales Rep", 6, ["Employee", "January", "February", "March"], 1, 10),
    ("Shipping Costs", 7, ["Customer", "North", "South", "East"], 1, 12),
    ("Simple Compound Interest", 2, ["Account", "Principal", "Years", "Rate"], 1, 7),
    ("Small Balance Sheet", 7, ["Item", "Current Assets", "Fixed Assets", "Other Assets"], 1, 8),
    ("Stock Change", 4, ["Stock", "Opening Value", "Closing Value"], 1, 9),
    ("Summer Sales", 9, ["Product", "Units", "Revenue"], 1, 11),
    ("Tax", 6, ["Week", "Sales", "Expenses", "Tax Rate"], 1, 9),
    ("Velocity Displacement", 7, ["Displacement", "Velocity"], 0, 12),
    ("Weekly Sales", 13, ["Week", "Sales", "COGS"], 1, 11),
    ("XY Scatter Plot", 10, ["Angle", "Range", "Height"], 0, 13),
]

# Instances per workbook in the shipped corpus; sums to 111.
SOD_COUNTS = {
    "Boomerang Sales": 5, "Demographic Profile": 4, "Dragging": 4,
    "Easy GDP Breakdown": 5, "Entire Shipping Costs": 8, "Entire Summer Sales": 6,
    "Expense Report": 3, "Future Value": 3, "GDP Breakdown": 4,
    "Income Statement": 3, "Income Statement 2": 4, "Invoices": 8,
    "Maturity Date": 4, "Net Income": 2, "Period Rate": 2, "Present Value": 3,
    "Pricing Table": 5, "Ramp Up And Down": 2, "Sales Rep": 3, "Shipping Costs": 4,
    "Simple Compound Interest": 1, "Small Balance Sheet": 4, "Stock Change": 2,
    "Summer Sales": 4, "Tax": 3, "Velocity Displacement": 3, "Weekly Sales": 7,
    "XY Scatter Plot": 5,
}

CHART_TYPES = ["Line", "Bar", "Column", "Pie", "Area", "XYScatter"]
LEGEND_POSITIONS = ["bottom", "right", "top", "left"]

CATEGORY_BY_ACTION = {
    "Write": "Entry and manipulation",
    "CopyPaste": "Entry and manipulation",
    "AutoFill": "Entry and manipulation",
    "CreateSheet": "Management",
    "Filter": "Management",
    "CreateChart": "Chart",
    "SetChartLegend": "Chart",
    "CreatePivotTable": "Pivot table",
    "SetFormat": "Formatting",
    "FreezePanes": "Formatting",
}


def slugify(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")


def singular(header: str) -> str:
    return header[:-1] if header.endswith("s") and len(header) > 3 else header


def build_seed_workbook(name: str, headers: list[str], label_cols: int,
                        rows: int, rng: random.Random) -> Workbook:
    book = Workbook.blank("Sheet1")
    for col, header in enumerate(headers, start=1):
        book.set_cell("Sheet1", col, 1, header)
    for row in range(2, rows + 1):
        for col, header in enumerate(headers, start=1):
            if col <= label_cols:
                book.set_cell("Sheet1", col, row, f"{singular(header)} {row - 1:02d}")
            elif "Rate" in header:
                book.set_cell("Sheet1", col, row, round(rng.uniform(0.01, 0.3), 3))
            else:
                book.set_cell("Sheet1", col, row, round(rng.uniform(10, 5000), 2))
    return book


def sheet_state(headers: list[str], rows: int) -> str:
    head = ", ".join(f'{column_letters(i + 1)}: "{h}"' for i, h in enumerate(headers))
    return (f'Sheet "Sheet1" has {len(headers)} columns (Headers are {head}) '
            f'and {rows} rows (1 header row and {rows - 1} data rows).')


def used_a1(headers: list[str], rows: int) -> str:
    return f"Sheet1!A1:{column_letters(len(headers))}{rows}"


# --------------------------------------------------------------- templates
# Each template returns (code text, reference steps with "Step k." prefixes).


def tpl_derived_column(headers, label_cols, rows, rng):
    numeric = [i + 1 for i in range(label_cols, len(headers))]
    col_b, col_c = numeric[0], numeric[1]
    new_col = len(headers) + 1
    op, word = rng.choice([("-", "difference"), ("+", "combined total")])
    name = rng.choice(["Result", "Delta", "Summary Value", "Outcome"])
    letter = column_letters(new_col)
    lb, lc = column_letters(col_b), column_letters(col_c)
    code = "\n".join([
        f'- - Write(range="Sheet1!{letter}1", value="{name}")',
        f'- - Write(range="Sheet1!{letter}2", value="={lb}2{op}{lc}2")',
        f'- - AutoFill(source="Sheet1!{letter}2", destination="Sheet1!{letter}2:{letter}{rows}")',
    ])
    steps = [
        f"Step 1. Add a {name} column after the existing data.",
        f"Step 2. Enter a formula that computes the {word} of "
        f"{headers[col_b - 1]} and {headers[col_c - 1]} for the first data row.",
        "Step 3. Fill the formula down so every data row gets the computed value.",
    ]
    return code, steps


def tpl_chart(headers, label_cols, rows, rng):
    chart_type = rng.choice(CHART_TYPES)
    position = rng.choice(LEGEND_POSITIONS)
    title = rng.choice(["Overview", "Trends", "Comparison", "Summary Chart"])
    code = "\n".join([
        f'- - CreateChart(source="{used_a1(headers, rows)}", destSheet="Sheet1", '
        f'chartType="{chart_type}", chartName="{title}")',
        f'- - SetChartLegend(chartName="{title}", position="{position}")',
    ])
    steps = [
        f"Step 1. Insert a {chart_type} chart that plots the whole table.",
        f"Step 2. Move the chart legend to the {position}.",
    ]
    return code, steps


def tpl_summary_sheet(headers, label_cols, rows, rng):
    numeric = [i + 1 for i in range(label_cols, len(headers))]
    col = rng.choice(numeric)
    letter = column_letters(col)
    code = "\n".join([
        '- - CreateSheet(sheetName="Summary")',
        f'- - Write(range="Summary!A1", value="Total {headers[col - 1]}")',
        f'  - Write(range="Summary!B1", value="=SUM(Sheet1!{letter}2:{letter}{rows})")',
    ])
    steps = [
        "Step 1. Add a sheet called Summary to the workbook.",
        f"Step 2. Put a label and a sum over the {headers[col - 1]} values "
        "into the first row of the new sheet.",
    ]
    return code, steps


def tpl_filter(headers, label_cols, rows, rng):
    numeric = [i + 1 for i in range(label_cols, len(headers))]
    col = rng.choice(numeric)
    threshold = rng.choice([100, 500, 1000, 2000, 2500])
    op = rng.choice(["<", ">"])
    code = (f'- - Filter(source="{used_a1(headers, rows)}", fieldIndex={col}, '
            f'criteria="{op}{threshold}")')
    direction = "below" if op == "<" else "above"
    steps = [
        f"Step 1. Filter the table so only rows with {headers[col - 1]} "
        f"{direction} {threshold} remain visible.",
    ]
    return code, steps


def tpl_formatting(headers, label_cols, rows, rng):
    last = column_letters(len(headers))
    prop, value, phrase = rng.choice([
        ("fontWeight", "bold", "make the header row bold"),
        ("fillColor", "#D9E1F2", "shade the header row"),
        ("numberFormat", "0.00", "show two decimal places in the header row"),
    ])
    code = "\n".join([
        f'- - SetFormat(range="Sheet1!A1:{last}1", property="{prop}", value="{value}")',
        '- - FreezePanes(range="Sheet1!A2")',
    ])
    steps = [
        f"Step 1. Format the first row to {phrase}.",
        "Step 2. Freeze the top row so the headers stay visible while scrolling.",
    ]
    return code, steps


def tpl_pivot(headers, label_cols, rows, rng):
    numeric = [i + 1 for i in range(label_cols, len(headers))]
    value_col = rng.choice(numeric)
    row_field = headers[0]
    code = "\n".join([
        '- - CreateSheet(sheetName="PivotSheet")',
        f'- - CreatePivotTable(source="{used_a1(headers, rows)}", destSheet="PivotSheet", '
        f'name="PivotTable1", rows="{row_field}", columns="", '
        f'values="{headers[value_col - 1]}")',
    ])
    steps = [
        "Step 1. Create a sheet to hold the pivot table.",
        f"Step 2. Build a pivot table that groups by {row_field} and "
        f"aggregates {headers[value_col - 1]}.",
    ]
    return code, steps


def tpl_copy_column(headers, label_cols, rows, rng):
    numeric = [i + 1 for i in range(label_cols, len(headers))]
    col = rng.choice(numeric)
    letter = column_letters(col)
    target = column_letters(len(headers) + 1)
    code = (f'- - CopyPaste(source="Sheet1!{letter}1:{letter}{rows}", '
            f'destination="Sheet1!{target}1:{target}{rows}")')
    steps = [
        f"Step 1. Duplicate the {headers[col - 1]} column into the first empty "
        "column to keep a working copy.",
    ]
    return code, steps


TEMPLATES = [tpl_derived_column, tpl_chart, tpl_summary_sheet, tpl_filter,
             tpl_formatting, tpl_pivot, tpl_copy_column]


# ----------------------------------------------------------- special cases


def profit_instance(headers, rows):
    code = "\n".join([
        '- - Write(range="Sheet1!D1", value="Profit")',
        '- - Write(range="Sheet1!D2", value="=B2-C2")',
        '- - AutoFill(source="Sheet1!D2", destination="Sheet1!D2:D11")',
        '- - CreateChart(source="Sheet1!A1:D11", destSheet="Sheet1", '
        'chartType="Line", chartName="Weekly Trends")',
        '- - SetChartLegend(chartName="Weekly Trends", position="bottom")',
    ])
    steps = [
        "Step 1. Add a Profit column next to the sales figures.",
        "Step 2. Enter the formula that subtracts COGS from Sales for the first week.",
        "Step 3. Fill the profit formula down through the remaining weeks.",
        "Step 4. Insert a Line chart over the table to show how the weekly figures move.",
        "Step 5. Put the chart legend at the bottom.",
    ]
    return code, steps


def shipping_filter_instance(headers, rows):
    code = '- - Filter(source="Sheet1!A1:E71", fieldIndex=3, criteria="<2000")'
    steps = [
        "Step 1. Filter the customer table to rows whose Milwaukee distance "
        "is under 2000.",
    ]
    return code, steps


def shipping_summary_instance(headers, rows):
    # The header writes form one step group: "- -" opens it, "-" lines join.
    code = "\n".join([
        '- - CreateSheet(sheetName="Sheet2")',
        f'- - Write(range="Sheet2!A1", value="{headers[0]}")',
        *[f'  - Write(range="Sheet2!{column_letters(i + 1)}1", value="{h}")'
          for i, h in enumerate(headers[1:], start=1)],
        '- - Write(range="Sheet2!B2", value="=Sheet1!B2")',
    ])
    steps = [
        "Step 1. Create Sheet2 for the condensed view.",
        "Step 2. Copy the header captions across the first row of Sheet2.",
        "Step 3. Link the first distance cell back to the source sheet.",
    ]
    return code, steps


SPECIALS = {
    ("Weekly Sales", 0): profit_instance,
    ("Entire Shipping Costs", 0): shipping_filter_instance,
    ("Entire Shipping Costs", 1): shipping_summary_instance,
}


def categories_for(code: str, catalog) -> list[str]:
    script = parse_script(code, catalog)
    found = {CATEGORY_BY_ACTION[a.name] for a in script.steps if a.name in CATEGORY_BY_ACTION}
    return sorted(found)


def main() -> int:
    catalog = seed_catalog()
    workbook_dir = DATA_DIR / "workbooks"
    workbook_dir.mkdir(parents=True, exist_ok=True)

    upstream = [{"workbook": name, "count": count} for name, count, *_ in WORKBOOKS]
    assert sum(e["count"] for e in upstream) == 221
    (DATA_DIR / "upstream_tasks.json").write_text(
        json.dumps(upstream, indent=1) + "\n", encoding="utf-8")

    instances: list[TaskInstance] = []
    for wb_index, (name, _count, headers, label_cols, rows) in enumerate(WORKBOOKS):
        slug = slugify(name)
        seed_rng = random.Random(9000 + wb_index)
        book = build_seed_workbook(name, headers, label_cols, rows, seed_rng)
        seed_path = workbook_dir / f"{slug}.json"
        save_workbook(book, seed_path)

        state = sheet_state(headers, rows)
        for i in range(SOD_COUNTS[name]):
            rng = random.Random(31000 + 97 * wb_index + i)
            special = SPECIALS.get((name, i))
            if special is not None:
                code, steps = special(headers, rows)
            else:
                template = TEMPLATES[(wb_index + i) % len(TEMPLATES)]
                code, steps = template(headers, label_cols, rows, rng)

            script = parse_script(code, catalog)
            diags = validate_script(script, catalog)
            if has_errors(diags):
                print(f"FATAL: {name} #{i}: {diags}", file=sys.stderr)
                return 1
            execute(script, load_workbook(seed_path))

            instances.append(TaskInstance(
                id=f"{slug}-{i + 1:02d}",
                workbook=name,
                categories=frozenset(categories_for(code, catalog)),
                code=code,
                reference_steps=tuple(steps),
                sheet_state=state,
                seed_workbook=f"workbooks/{slug}.json",
            ))

    assert len(instances) == 111, len(instances)
    sweep_rng = random.Random(2024)
    sweep_ids = tuple(sorted(sweep_rng.sample(sorted(inst.id for inst in instances), 20)))
    manifest = recount(instances, sweep_ids)
    corpus = Corpus(tuple(instances), manifest)
    write_corpus(corpus, DATA_DIR / "corpus.jsonl")
    print(f"wrote {len(instances)} instances, "
          f"{len(list(workbook_dir.glob('*.json')))} workbooks")
    print("category counts:", manifest.category_counts)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
