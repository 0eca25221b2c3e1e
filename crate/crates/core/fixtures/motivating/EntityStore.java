package org.example.storage;

import java.util.ArrayList;
import java.util.Arrays;
import java.util.List;
import java.util.Map;
import java.util.concurrent.ConcurrentHashMap;

import org.example.storage.cursor.EntityCursor;
import org.example.storage.cursor.PropertyCursor;
import org.example.storage.values.Value;
import org.example.storage.values.Values;

/**
 * Read access to entities and their properties.
 */
public class EntityStore implements AutoCloseable {
    private static final int DEFAULT_POOL_SIZE = 16;

    private final Map<Long, EntityCursor> cursorCache = new ConcurrentHashMap<>();
    private final List<EntityCursor> pool = new ArrayList<>();
    private final StoreReader reader;
    private volatile boolean closed;
    private long reads;
    private int evictions;

    public EntityStore(StoreReader reader) {
        this.reader = reader;
        for (int i = 0; i < DEFAULT_POOL_SIZE; i++) {
            pool.add(new EntityCursor(reader));
        }
    }

    public boolean isClosed() {
        return closed;
    }

    @Override
    public void close() {
        if (closed) {
            return;
        }
        closed = true;
        for (EntityCursor cursor : pool) {
            cursor.close();
        }
        pool.clear();
        cursorCache.clear();
    }

    private void assertOpen() {
        if (closed) {
            throw new IllegalStateException("store is closed");
        }
    }

    private EntityCursor acquireCursor(long entityId) {
        EntityCursor cached = cursorCache.get(entityId);
        if (cached != null) {
            return cached;
        }
        EntityCursor cursor;
        if (pool.isEmpty()) {
            cursor = new EntityCursor(reader);
        } else {
            cursor = pool.remove(pool.size() - 1);
        }
        cursorCache.put(entityId, cursor);
        reads++;
        return cursor;
    }

    public long readCount() {
        return reads;
    }

    public void resetReads() {
        reads = 0;
    }

    public boolean entityExists(long entityId) {
        assertOpen();
        EntityCursor cursor = acquireCursor(entityId);
        cursor.seek(entityId);
        return cursor.next();
    }

    public int entityPropertyCount(long entityId) {
        assertOpen();
        EntityCursor cursor = acquireCursor(entityId);
        cursor.seek(entityId);
        PropertyCursor props = cursor.properties();
        int count = 0;
        while (props.next()) {
            count++;
        }
        return count;
    }

    public Value entityGetProperty(long entityId, int propertyKey) {
        assertOpen();
        EntityCursor cursor = acquireCursor(entityId);
        cursor.seek(entityId);
        PropertyCursor props = cursor.properties();
        while (props.next()) {
            if (props.propertyKey() == propertyKey) {
                return props.propertyValue(propertyKey);
            }
        }
        return Values.NO_VALUE;
    }

    public boolean entityHasProperty(long entityId, int propertyKey) {
        return entityGetProperty(entityId, propertyKey) != Values.NO_VALUE;
    }

    public int[] entityPropertyKeys(long entityId) {
        assertOpen();
        EntityCursor cursor = acquireCursor(entityId);
        cursor.seek(entityId);
        PropertyCursor props = cursor.properties();
        int[] keys = new int[8];
        int size = 0;
        while (props.next()) {
            if (size == keys.length) {
                keys = Arrays.copyOf(keys, size * 2);
            }
            keys[size++] = props.propertyKey();
        }
        return Arrays.copyOf(keys, size);
    }

    public void releaseCursor(long entityId) {
        EntityCursor cursor = cursorCache.remove(entityId);
        if (cursor != null && pool.size() < DEFAULT_POOL_SIZE) {
            cursor.reset();
            pool.add(cursor);
        }
    }

    public List<Long> cachedEntities() {
        List<Long> ids = new ArrayList<>(cursorCache.keySet());
        ids.sort(null);
        return ids;
    }

    /**
     * Reads the given properties of an entity in key order.
     */
    public Value[] entityGetProperties(long entityId, int[] propertyKeys) {
        assertOpen();
        EntityCursor cursor = acquireCursor(entityId);
        cursor.reset();
        int itemsToReturn = propertyKeys.length;
        int i = 0;
        cursor.seek(entityId);
        Value[] values = new Value[itemsToReturn];
        Arrays.fill(values, Values.NO_VALUE);
        PropertyCursor props = cursor.properties();
        while (props.next() && i < itemsToReturn) {
            int key = props.propertyKey();
            values[i] = props.propertyValue(key);
            i++;
        }
        return i == itemsToReturn ? values : Arrays.copyOf(values, i);
    }
}
