package reports;

import java.io.IOException;
import java.io.Writer;
import java.time.LocalDate;
import java.util.ArrayList;
import java.util.List;
import java.util.Map;

public class ReportWriter {
    private final Writer out;
    private final String title;
    private int rowsWritten;

    public ReportWriter(Writer out, String title) {
        this.out = out;
        this.title = title;
    }

    public void writeCsv(List<String> columns, List<Map<String, Object>> rows) throws IOException {
        StringBuilder header = new StringBuilder();
        for (int c = 0; c < columns.size(); c++) {
            if (c > 0) {
                header.append(',');
            }
            header.append(columns.get(c));
        }
        out.write(header.toString());
        out.write('\n');
        for (Map<String, Object> row : rows) {
            StringBuilder line = new StringBuilder();
            for (int c = 0; c < columns.size(); c++) {
                if (c > 0) {
                    line.append(',');
                }
                Object v = row.get(columns.get(c));
                String cell = v == null ? "" : v.toString();
                if (cell.contains(",") || cell.contains("\"")) {
                    cell = "\"" + cell.replace("\"", "\"\"") + "\"";
                }
                line.append(cell);
            }
            out.write(line.toString());
            out.write('\n');
            rowsWritten++;
        }
        out.flush();
    }

    public void writeSummary(Map<String, Double> totals, LocalDate from, LocalDate to) throws IOException {
        out.write("# " + title + "\n");
        out.write("period: " + from + " .. " + to + "\n\n");
        double grand = 0;
        String best = null;
        double bestValue = Double.NEGATIVE_INFINITY;
        for (Map.Entry<String, Double> e : totals.entrySet()) {
            grand += e.getValue();
            if (e.getValue() > bestValue) {
                bestValue = e.getValue();
                best = e.getKey();
            }
        }
        for (Map.Entry<String, Double> e : totals.entrySet()) {
            double share = grand == 0 ? 0 : e.getValue() / grand * 100;
            out.write(String.format("%-20s %12.2f %6.1f%%%n", e.getKey(), e.getValue(), share));
        }
        out.write(String.format("%-20s %12.2f%n", "total", grand));
        if (best != null) {
            out.write("largest: " + best + "\n");
        }
        out.flush();
    }

    public List<String> paginate(List<String> lines, int pageHeight, int width) {
        List<String> pages = new ArrayList<>();
        StringBuilder page = new StringBuilder();
        int used = 0;
        int pageNo = 1;
        for (String line : lines) {
            String text = line;
            if (text.length() > width) {
                text = text.substring(0, width - 1) + "~";
            }
            if (used == pageHeight - 1) {
                String footer = "-- page " + pageNo + " --";
                int pad = (width - footer.length()) / 2;
                page.append(" ".repeat(Math.max(0, pad))).append(footer).append('\n');
                pages.add(page.toString());
                page.setLength(0);
                used = 0;
                pageNo++;
            }
            page.append(text).append('\n');
            used++;
        }
        if (used > 0) {
            pages.add(page.toString());
        }
        return pages;
    }

    public void writeTable(List<String[]> cells) throws IOException {
        if (cells.isEmpty()) {
            return;
        }
        int cols = cells.get(0).length;
        int[] widths = new int[cols];
        for (String[] row : cells) {
            for (int c = 0; c < cols; c++) {
                widths[c] = Math.max(widths[c], row[c].length());
            }
        }
        StringBuilder rule = new StringBuilder("+");
        for (int w : widths) {
            rule.append("-".repeat(w + 2)).append('+');
        }
        out.write(rule + "\n");
        for (int r = 0; r < cells.size(); r++) {
            StringBuilder line = new StringBuilder("|");
            for (int c = 0; c < cols; c++) {
                line.append(' ').append(String.format("%-" + widths[c] + "s", cells.get(r)[c])).append(" |");
            }
            out.write(line + "\n");
            if (r == 0) {
                out.write(rule + "\n");
            }
        }
        out.write(rule + "\n");
        rowsWritten += cells.size() - 1;
    }
}
