package shop.orders;

import java.math.BigDecimal;
import java.util.ArrayList;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

public class OrderService {
    private static final BigDecimal FREE_SHIPPING_LIMIT = new BigDecimal("50.00");
    private static final BigDecimal BASE_SHIPPING = new BigDecimal("4.99");

    private final Inventory inventory;
    private final PaymentGateway payments;
    private final AuditLog audit;
    private int processed;

    public OrderService(Inventory inventory, PaymentGateway payments, AuditLog audit) {
        this.inventory = inventory;
        this.payments = payments;
        this.audit = audit;
    }

    public Receipt processOrder(Order order, Customer customer) throws PaymentException {
        if (order.lines().isEmpty()) {
            throw new IllegalArgumentException("empty order");
        }
        audit.record("processing " + order.id());
        List<String> missing = new ArrayList<>();
        for (OrderLine line : order.lines()) {
            int available = inventory.available(line.sku());
            if (available < line.quantity()) {
                missing.add(line.sku());
            }
        }
        if (!missing.isEmpty()) {
            audit.record("missing stock: " + String.join(",", missing));
            return Receipt.rejected(order.id(), missing);
        }
        BigDecimal subtotal = BigDecimal.ZERO;
        for (OrderLine line : order.lines()) {
            BigDecimal price = line.unitPrice().multiply(BigDecimal.valueOf(line.quantity()));
            subtotal = subtotal.add(price);
        }
        BigDecimal discount = BigDecimal.ZERO;
        if (customer.isPremium()) {
            discount = subtotal.multiply(new BigDecimal("0.10"));
        }
        BigDecimal total = subtotal.subtract(discount);
        String token = payments.authorize(customer.paymentMethod(), total);
        for (OrderLine line : order.lines()) {
            inventory.reserve(line.sku(), line.quantity());
        }
        processed++;
        audit.record("charged " + total + " for " + order.id());
        return Receipt.accepted(order.id(), total, token);
    }

    public BigDecimal computeShipping(Order order, Address destination) {
        BigDecimal weight = BigDecimal.ZERO;
        for (OrderLine line : order.lines()) {
            weight = weight.add(line.weight().multiply(BigDecimal.valueOf(line.quantity())));
        }
        BigDecimal cost = BASE_SHIPPING;
        if (weight.compareTo(BigDecimal.TEN) > 0) {
            BigDecimal extra = weight.subtract(BigDecimal.TEN);
            cost = cost.add(extra.multiply(new BigDecimal("0.45")));
        }
        String country = destination.country();
        if (!country.equals("US")) {
            cost = cost.add(new BigDecimal("12.00"));
            if (destination.isRemote()) {
                cost = cost.add(new BigDecimal("8.50"));
            }
        }
        BigDecimal value = order.value();
        if (value.compareTo(FREE_SHIPPING_LIMIT) >= 0 && country.equals("US")) {
            cost = BigDecimal.ZERO;
        }
        audit.record("shipping " + cost + " to " + country);
        return cost;
    }

    public String summarizeInvoice(Invoice invoice) {
        StringBuilder sb = new StringBuilder();
        sb.append("Invoice ").append(invoice.number()).append('\n');
        sb.append("Date: ").append(invoice.date()).append('\n');
        sb.append("Customer: ").append(invoice.customerName()).append('\n');
        sb.append('\n');
        int width = 40;
        for (InvoiceLine l : invoice.lines()) {
            String label = l.description();
            if (label.length() > width - 12) {
                label = label.substring(0, width - 15) + "...";
            }
            sb.append(String.format("%-28s %10s%n", label, l.amount()));
        }
        sb.append('\n');
        BigDecimal tax = invoice.tax();
        BigDecimal net = invoice.net();
        sb.append(String.format("%-28s %10s%n", "Net", net));
        sb.append(String.format("%-28s %10s%n", "Tax", tax));
        sb.append(String.format("%-28s %10s%n", "Total", net.add(tax)));
        if (invoice.isOverdue()) {
            sb.append("OVERDUE since ").append(invoice.dueDate()).append('\n');
        }
        return sb.toString();
    }

    public List<String> validateCustomer(Customer customer) {
        List<String> problems = new ArrayList<>();
        String email = customer.email();
        if (email == null || email.isBlank()) {
            problems.add("email missing");
        } else if (!email.contains("@")) {
            problems.add("email malformed: " + email);
        }
        String phone = customer.phone();
        if (phone != null) {
            String digits = phone.replaceAll("[^0-9]", "");
            if (digits.length() < 7 || digits.length() > 15) {
                problems.add("phone has " + digits.length() + " digits");
            }
        }
        Map<String, Integer> seen = new HashMap<>();
        for (Address a : customer.addresses()) {
            String key = a.street().toLowerCase() + "|" + a.zip();
            seen.merge(key, 1, Integer::sum);
        }
        for (Map.Entry<String, Integer> e : seen.entrySet()) {
            if (e.getValue() > 1) {
                problems.add("duplicate address " + e.getKey());
            }
        }
        if (customer.birthYear() > 0 && customer.birthYear() < 1900) {
            problems.add("implausible birth year");
        }
        audit.record("validated " + customer.id() + ": " + problems.size() + " problem(s)");
        return problems;
    }
}
