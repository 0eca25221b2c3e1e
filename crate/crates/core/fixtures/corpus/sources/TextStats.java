package text;

import java.util.ArrayList;
import java.util.Comparator;
import java.util.HashMap;
import java.util.List;
import java.util.Map;
import java.util.TreeMap;

public class TextStats {
    private final int minWordLength;
    private final List<String> stopWords;

    public TextStats(int minWordLength, List<String> stopWords) {
        this.minWordLength = minWordLength;
        this.stopWords = stopWords;
    }

    public List<Map.Entry<String, Integer>> topWords(String text, int limit) {
        Map<String, Integer> counts = new HashMap<>();
        StringBuilder word = new StringBuilder();
        for (int i = 0; i <= text.length(); i++) {
            char c = i < text.length() ? text.charAt(i) : ' ';
            if (Character.isLetterOrDigit(c) || c == '\'') {
                word.append(Character.toLowerCase(c));
                continue;
            }
            if (word.length() >= minWordLength) {
                String w = word.toString();
                if (!stopWords.contains(w)) {
                    counts.merge(w, 1, Integer::sum);
                }
            }
            word.setLength(0);
        }
        List<Map.Entry<String, Integer>> entries = new ArrayList<>(counts.entrySet());
        entries.sort((a, b) -> {
            int byCount = Integer.compare(b.getValue(), a.getValue());
            return byCount != 0 ? byCount : a.getKey().compareTo(b.getKey());
        });
        if (entries.size() > limit) {
            entries = new ArrayList<>(entries.subList(0, limit));
        }
        return entries;
    }

    public String lengthHistogram(List<String> lines, int buckets) {
        int longest = 0;
        for (String line : lines) {
            longest = Math.max(longest, line.length());
        }
        int bucketWidth = Math.max(1, (longest + buckets - 1) / buckets);
        int[] counts = new int[buckets];
        for (String line : lines) {
            int b = Math.min(buckets - 1, line.length() / bucketWidth);
            counts[b]++;
        }
        int peak = 1;
        for (int c : counts) {
            peak = Math.max(peak, c);
        }
        StringBuilder out = new StringBuilder();
        for (int b = 0; b < buckets; b++) {
            int lo = b * bucketWidth;
            int hi = lo + bucketWidth - 1;
            int bar = counts[b] * 30 / peak;
            out.append(String.format("%4d-%-4d |", lo, hi));
            for (int k = 0; k < bar; k++) {
                out.append('#');
            }
            out.append(' ').append(counts[b]).append('\n');
        }
        return out.toString();
    }

    public double readability(String text) {
        int sentences = 0;
        for (char c : text.toCharArray()) {
            if (c == '.' || c == '!' || c == '?') {
                sentences++;
            }
        }
        if (sentences == 0) {
            sentences = 1;
        }
        String[] words = text.split("\\s+");
        int syllables = 0;
        for (String w : words) {
            String lower = w.toLowerCase().replaceAll("[^a-z]", "");
            int groups = 0;
            boolean prevVowel = false;
            for (char c : lower.toCharArray()) {
                boolean vowel = "aeiouy".indexOf(c) >= 0;
                if (vowel && !prevVowel) {
                    groups++;
                }
                prevVowel = vowel;
            }
            if (lower.endsWith("e") && groups > 1) {
                groups--;
            }
            syllables += Math.max(1, groups);
        }
        double wordsPerSentence = (double) words.length / sentences;
        double syllablesPerWord = (double) syllables / Math.max(1, words.length);
        return 206.835 - 1.015 * wordsPerSentence - 84.6 * syllablesPerWord;
    }

    public Map<Character, List<String>> indexByInitial(List<String> words) {
        Map<Character, List<String>> index = new TreeMap<>();
        for (String raw : words) {
            String w = raw.trim();
            if (w.isEmpty()) {
                continue;
            }
            char initial = Character.toUpperCase(w.charAt(0));
            if (!Character.isLetter(initial)) {
                initial = '#';
            }
            index.computeIfAbsent(initial, k -> new ArrayList<>()).add(w);
        }
        for (List<String> group : index.values()) {
            group.sort(Comparator.comparing(String::toLowerCase));
            int write = 0;
            for (int read = 0; read < group.size(); read++) {
                if (read == 0 || !group.get(read).equalsIgnoreCase(group.get(read - 1))) {
                    group.set(write++, group.get(read));
                }
            }
            while (group.size() > write) {
                group.remove(group.size() - 1);
            }
        }
        return index;
    }
}
