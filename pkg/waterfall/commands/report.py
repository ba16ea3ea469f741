"""
Report Generation Module
Renders the acceptance table as a PDF
"""

from datetime import datetime
from typing import List

from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER
from reportlab.lib.pagesizes import A4, landscape
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from waterfall.models.acceptance import CriterionResult

PASS_COLOR = colors.HexColor('#c6f6d5')
FAIL_COLOR = colors.HexColor('#fed7d7')


def create_pdf_report(results: List[CriterionResult], output_path: str, full: bool) -> str:
    """Create a PDF report from acceptance results"""

    doc = SimpleDocTemplate(
        output_path,
        pagesize=landscape(A4),
        rightMargin=36,
        leftMargin=36,
        topMargin=48,
        bottomMargin=36
    )
    elements = []

    # Styles
    styles = getSampleStyleSheet()
    title_style = ParagraphStyle(
        'CustomTitle',
        parent=styles['Heading1'],
        fontSize=20,
        textColor=colors.HexColor('#1a365d'),
        spaceAfter=12,
        alignment=TA_CENTER
    )
    subtitle_style = ParagraphStyle(
        'CustomSubtitle',
        parent=styles['Normal'],
        fontSize=11,
        textColor=colors.HexColor('#4a5568'),
        spaceAfter=12,
        alignment=TA_CENTER
    )
    cell_style = ParagraphStyle(
        'Cell',
        parent=styles['Normal'],
        fontSize=8,
        leading=10,
    )

    passed = sum(r.passed for r in results)
    scope = "analytic and Monte-Carlo criteria" if full else "analytic criteria only"
    elements.append(Paragraph("Waterfall Threshold Acceptance Report", title_style))
    elements.append(Paragraph(
        f"Generated: {datetime.now().strftime('%B %d, %Y at %H:%M')} - {scope}",
        subtitle_style,
    ))
    elements.append(Paragraph(f"{passed} of {len(results)} checks passed", subtitle_style))
    elements.append(Spacer(1, 0.2*inch))

    data = [["#", "Check", "Expected", "Measured", "Tolerance", "Time (s)", "Result"]]
    for r in results:
        budget = f" / {r.budget_s:g}" if r.budget_s is not None else ""
        data.append([
            str(r.number),
            Paragraph(r.name, cell_style),
            Paragraph(r.expected, cell_style),
            Paragraph(r.measured, cell_style),
            Paragraph(r.tolerance, cell_style),
            f"{r.runtime_s:.2f}{budget}",
            "PASS" if r.passed else "FAIL",
        ])

    table = Table(
        data,
        colWidths=[0.4*inch, 2.8*inch, 1.6*inch, 1.9*inch, 1.4*inch, 1.0*inch, 0.7*inch],
        repeatRows=1,
    )
    style = [
        ('BACKGROUND', (0, 0), (-1, 0), colors.HexColor('#2d3748')),
        ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
        ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
        ('FONTSIZE', (0, 0), (-1, -1), 8),
        ('VALIGN', (0, 0), (-1, -1), 'MIDDLE'),
        ('GRID', (0, 0), (-1, -1), 0.5, colors.HexColor('#e2e8f0')),
    ]
    for row, r in enumerate(results, start=1):
        style.append(('BACKGROUND', (-1, row), (-1, row), PASS_COLOR if r.passed else FAIL_COLOR))
    table.setStyle(TableStyle(style))
    elements.append(table)

    doc.build(elements)
    return output_path
