package config;

import java.io.BufferedReader;
import java.io.IOException;
import java.nio.file.Files;
import java.nio.file.Path;
import java.util.ArrayList;
import java.util.LinkedHashMap;
import java.util.List;
import java.util.Map;

public class ConfigLoader {
    private final Map<String, String> defaults;
    private final List<String> warnings = new ArrayList<>();

    public ConfigLoader(Map<String, String> defaults) {
        this.defaults = defaults;
    }

    public Map<String, String> load(Path file) throws IOException {
        Map<String, String> values = new LinkedHashMap<>();
        int lineNo = 0;
        try (BufferedReader reader = Files.newBufferedReader(file)) {
            String line;
            while ((line = reader.readLine()) != null) {
                lineNo++;
                String trimmed = line.trim();
                if (trimmed.isEmpty() || trimmed.startsWith("#")) {
                    continue;
                }
                int eq = trimmed.indexOf('=');
                if (eq < 0) {
                    warnings.add(file + ":" + lineNo + ": no '=' in line");
                    continue;
                }
                String key = trimmed.substring(0, eq).trim();
                String value = trimmed.substring(eq + 1).trim();
                values.put(key, value);
            }
        } catch (IOException e) {
            warnings.add("cannot read " + file + ": " + e.getMessage());
            throw e;
        }
        for (Map.Entry<String, String> d : defaults.entrySet()) {
            if (!values.containsKey(d.getKey())) {
                values.put(d.getKey(), d.getValue());
            }
        }
        String profile = values.get("profile");
        if (profile != null) {
            String prefix = profile + ".";
            Map<String, String> overrides = new LinkedHashMap<>();
            for (Map.Entry<String, String> e : values.entrySet()) {
                if (e.getKey().startsWith(prefix)) {
                    overrides.put(e.getKey().substring(prefix.length()), e.getValue());
                }
            }
            values.putAll(overrides);
        }
        return values;
    }

    public Object parseValue(String key, String raw) {
        String text = raw.trim();
        String type = "string";
        int colon = key.lastIndexOf(':');
        if (colon > 0) {
            type = key.substring(colon + 1);
        }
        Object result;
        switch (type) {
            case "int":
                result = Integer.parseInt(text);
                break;
            case "bool":
                result = text.equalsIgnoreCase("true") || text.equals("1") || text.equalsIgnoreCase("yes");
                break;
            case "list":
                List<String> items = new ArrayList<>();
                for (String part : text.split(",")) {
                    if (!part.isBlank()) {
                        items.add(part.trim());
                    }
                }
                result = items;
                break;
            default:
                result = text;
        }
        if (result instanceof String && ((String) result).startsWith("${")) {
            String ref = ((String) result).substring(2, ((String) result).length() - 1);
            result = defaults.getOrDefault(ref, "");
        }
        return result;
    }

    public List<String> resolveIncludes(Path base, List<String> lines, int depth) throws IOException {
        if (depth > 8) {
            throw new IOException("include nesting too deep at " + base);
        }
        List<String> out = new ArrayList<>();
        for (String line : lines) {
            if (!line.startsWith("@include ")) {
                out.add(line);
                continue;
            }
            String target = line.substring("@include ".length()).trim();
            if (target.startsWith("\"") && target.endsWith("\"")) {
                target = target.substring(1, target.length() - 1);
            }
            Path resolved = base.resolveSibling(target).normalize();
            if (!Files.exists(resolved)) {
                warnings.add("missing include " + resolved);
                continue;
            }
            List<String> nested = Files.readAllLines(resolved);
            out.addAll(resolveIncludes(resolved, nested, depth + 1));
        }
        int blanks = 0;
        List<String> compact = new ArrayList<>();
        for (String l : out) {
            if (l.isBlank()) {
                blanks++;
                if (blanks > 1) {
                    continue;
                }
            } else {
                blanks = 0;
            }
            compact.add(l);
        }
        return compact;
    }

    public String describe(Map<String, String> values) {
        StringBuilder sb = new StringBuilder();
        int keyWidth = 0;
        for (String k : values.keySet()) {
            keyWidth = Math.max(keyWidth, k.length());
        }
        List<String> secret = new ArrayList<>();
        for (String k : values.keySet()) {
            String lower = k.toLowerCase();
            if (lower.contains("password") || lower.contains("token") || lower.contains("secret")) {
                secret.add(k);
            }
        }
        for (Map.Entry<String, String> e : values.entrySet()) {
            String shown = secret.contains(e.getKey()) ? "******" : e.getValue();
            sb.append(String.format("%-" + keyWidth + "s = %s%n", e.getKey(), shown));
        }
        if (!warnings.isEmpty()) {
            sb.append("warnings:\n");
            for (String w : warnings) {
                sb.append("  ").append(w).append('\n');
            }
        }
        return sb.toString();
    }
}
