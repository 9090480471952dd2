"""
Learning curves: `python manage.py plot --csv runs/*/metrics.csv --column mean_reward --output charts`.
"""

# 1. Standard library
from pathlib import Path

# 2. Local imports
from app_analysis.charts import line_chart_svg, series_from_csvs, write_svg
from app_runs.commands import OperatorCommand


class Command(OperatorCommand):
    help = 'Write one SVG line chart per column, one line per CSV file.'

    def add_arguments(self, parser):
        parser.add_argument('--csv', dest='paths', nargs='+', required=True, help='metrics.csv or eval.csv files.')
        parser.add_argument('--column', dest='columns', action='append', required=True,
                            help='Column to plot; may be repeated.')
        parser.add_argument('--output', required=True, help='Directory for the SVG files.')

    def run(self, paths, columns, output, **options):
        output = Path(output)
        output.mkdir(parents=True, exist_ok=True)
        for column in columns:
            series = series_from_csvs(paths, column)
            path = write_svg(output / f'{column}.svg', line_chart_svg(column, series, x_label='step', y_label=column))
            self.stdout.write(str(path))
