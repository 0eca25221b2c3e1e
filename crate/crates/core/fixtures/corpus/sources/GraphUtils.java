package graphs;

import java.util.ArrayDeque;
import java.util.ArrayList;
import java.util.Collections;
import java.util.Deque;
import java.util.HashMap;
import java.util.HashSet;
import java.util.List;
import java.util.Map;
import java.util.Set;

public final class GraphUtils {
    private GraphUtils() {
    }

    public static List<Integer> shortestPath(Map<Integer, List<Integer>> adj, int from, int to) {
        if (from == to) {
            return Collections.singletonList(from);
        }
        Map<Integer, Integer> parent = new HashMap<>();
        Deque<Integer> queue = new ArrayDeque<>();
        queue.add(from);
        parent.put(from, from);
        boolean found = false;
        search:
        while (!queue.isEmpty()) {
            int node = queue.poll();
            for (int next : adj.getOrDefault(node, Collections.emptyList())) {
                if (parent.containsKey(next)) {
                    continue;
                }
                parent.put(next, node);
                if (next == to) {
                    found = true;
                    break search;
                }
                queue.add(next);
            }
        }
        if (!found) {
            return Collections.emptyList();
        }
        List<Integer> path = new ArrayList<>();
        int cur = to;
        while (cur != from) {
            path.add(cur);
            cur = parent.get(cur);
        }
        path.add(from);
        Collections.reverse(path);
        return path;
    }

    public static List<String> topologicalSort(Map<String, Set<String>> deps) {
        Map<String, Integer> indegree = new HashMap<>();
        for (String node : deps.keySet()) {
            indegree.putIfAbsent(node, 0);
            for (String d : deps.get(node)) {
                indegree.putIfAbsent(d, 0);
            }
        }
        for (Set<String> targets : deps.values()) {
            for (String t : targets) {
                indegree.put(t, indegree.get(t) + 1);
            }
        }
        Deque<String> ready = new ArrayDeque<>();
        for (Map.Entry<String, Integer> e : indegree.entrySet()) {
            if (e.getValue() == 0) {
                ready.add(e.getKey());
            }
        }
        List<String> order = new ArrayList<>();
        while (!ready.isEmpty()) {
            String n = ready.poll();
            order.add(n);
            for (String t : deps.getOrDefault(n, Collections.emptySet())) {
                int left = indegree.get(t) - 1;
                indegree.put(t, left);
                if (left == 0) {
                    ready.add(t);
                }
            }
        }
        if (order.size() != indegree.size()) {
            throw new IllegalStateException("cycle among " + (indegree.size() - order.size()) + " nodes");
        }
        return order;
    }

    public static int countComponents(int n, int[][] edges) {
        int[] root = new int[n];
        int[] rank = new int[n];
        for (int i = 0; i < n; i++) {
            root[i] = i;
        }
        int components = n;
        for (int[] e : edges) {
            int a = e[0];
            while (root[a] != a) {
                root[a] = root[root[a]];
                a = root[a];
            }
            int b = e[1];
            while (root[b] != b) {
                root[b] = root[root[b]];
                b = root[b];
            }
            if (a == b) {
                continue;
            }
            if (rank[a] < rank[b]) {
                root[a] = b;
            } else if (rank[a] > rank[b]) {
                root[b] = a;
            } else {
                root[b] = a;
                rank[a]++;
            }
            components--;
        }
        return components;
    }

    public static Map<Integer, Integer> degreeHistogram(Map<Integer, List<Integer>> adj, boolean undirected) {
        Map<Integer, Integer> degree = new HashMap<>();
        for (Map.Entry<Integer, List<Integer>> e : adj.entrySet()) {
            degree.merge(e.getKey(), e.getValue().size(), Integer::sum);
            if (undirected) {
                for (int v : e.getValue()) {
                    degree.merge(v, 0, Integer::sum);
                }
            }
        }
        int max = 0;
        for (int d : degree.values()) {
            max = Math.max(max, d);
        }
        Map<Integer, Integer> histogram = new HashMap<>();
        for (int d = 0; d <= max; d++) {
            histogram.put(d, 0);
        }
        for (int d : degree.values()) {
            histogram.put(d, histogram.get(d) + 1);
        }
        Set<Integer> empty = new HashSet<>();
        for (Map.Entry<Integer, Integer> e : histogram.entrySet()) {
            if (e.getValue() == 0) {
                empty.add(e.getKey());
            }
        }
        histogram.keySet().removeAll(empty);
        return histogram;
    }
}
