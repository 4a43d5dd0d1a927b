"""CSV and Excel export for benchmark and tuning tables"""
from io import BytesIO
from pathlib import Path
from typing import Union

import pandas as pd
from openpyxl.styles import Alignment, Font, PatternFill

# Human-readable headers for the Excel sheet
COLUMN_TITLES = {
    'lmax': 'lmax',
    'params': 'Block parameters',
    'procs': 'Processes',
    't_step1': 'Step 1 [s]',
    't_exchange': 'Exchange [s]',
    't_step2': 'Step 2 [s]',
    'total': 'Total [s]',
    'gflops_estimate': 'GFLOPS (est.)',
    'exchanged_bytes': 'Exchanged bytes',
    'ring_block': 'Ring block',
    'beta_segment_len': 'Beta segment',
    'alm_segment_len': 'Alm segment',
    'seconds': 'Time [s]',
    'digest': 'Map digest',
}

_SECONDS_COLUMNS = {'t_step1', 't_exchange', 't_step2', 'total', 'seconds'}


def export_report_to_csv(report: pd.DataFrame, path: Union[str, Path]) -> None:
    """Write a report with its raw column names (the CSV contract)"""
    report.to_csv(path, index=False)


def export_report_to_excel(report: pd.DataFrame, sheet_name: str = 'Benchmark') -> BytesIO:
    """
    Export a report DataFrame to an .xlsx workbook in memory.

    Creates a formatted spreadsheet with:
    - Header row with readable column titles
    - One row per report row
    - Timing columns shown with 6 decimals

    Args:
        report: Timing or tuning table
        sheet_name: Worksheet title

    Returns:
        BytesIO buffer containing the Excel file

    Raises:
        ValueError: If the report has no rows

    Examples:
        >>> buffer = export_report_to_excel(run_benchmark([16]))
        >>> with open('bench.xlsx', 'wb') as f:
        ...     f.write(buffer.read())
    """
    if report.empty:
        raise ValueError("Report must have at least one row")

    seconds_positions = [i + 1 for i, col in enumerate(report.columns) if col in _SECONDS_COLUMNS]
    df = report.rename(columns={k: v for k, v in COLUMN_TITLES.items() if k in report.columns})

    output = BytesIO()
    with pd.ExcelWriter(output, engine='openpyxl') as writer:
        df.to_excel(writer, index=False, sheet_name=sheet_name)
        worksheet = writer.sheets[sheet_name]

        header_fill = PatternFill(start_color="4472C4", end_color="4472C4", fill_type="solid")
        header_font = Font(bold=True, color="FFFFFF")
        for cell in worksheet[1]:
            cell.fill = header_fill
            cell.font = header_font
            cell.alignment = Alignment(horizontal='center', vertical='center')

        for column in worksheet.columns:
            max_length = max((len(str(cell.value)) for cell in column if cell.value is not None), default=0)
            worksheet.column_dimensions[column[0].column_letter].width = min(max_length + 2, 50)

        for row in worksheet.iter_rows(min_row=2):
            for cell in row:
                if isinstance(cell.value, (int, float)):
                    cell.alignment = Alignment(horizontal='right')
                    if cell.column in seconds_positions:
                        cell.number_format = '0.000000'

    output.seek(0)
    return output
