//! Few-shot prompt for Extract Method candidates.

use std::fmt::Write;

use serde::Serialize;

use crate::model::{LineSpan, LongMethod};

const TASK_OVERVIEW: &str = "\
You are an experienced Java developer reviewing code for Extract Method \
refactoring opportunities. Extract Method takes a contiguous run of \
statements out of a method, moves it into a new method with a descriptive \
name, passes the values it reads as parameters, and replaces the original \
statements with a call. Good candidates perform one coherent sub-task, keep \
the host method readable, and leave behind a call that explains itself.";

const LONG_METHOD_DEFINITION: &str = "\
A long method mixes several concerns in one body, which makes it harder to \
read, test, and change. Look for groups of statements that prepare data, \
validate input, perform a self-contained computation, or format output. \
Do not propose the entire body, and do not propose single statements.";

const OUTPUT_FORMAT: &str = "\
Answer with a JSON array and nothing else. Each element must be an object \
with the keys \"function_name\" (a Java identifier for the new method), \
\"line_start\" and \"line_end\" (integers, inclusive). Line numbers refer to \
the numbers printed at the start of each line of the target method. \
Propose several alternatives, best first.";

/// A worked example: numbered method text and the expected answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FewShotExample {
    pub method: String,
    pub answer: String,
}

fn long_example() -> FewShotExample {
    FewShotExample {
        method: "\
40: public Invoice buildInvoice(Order order, Customer customer) {
41:     Invoice invoice = new Invoice(order.id());
42:     invoice.setDate(LocalDate.now());
43:     BigDecimal subtotal = BigDecimal.ZERO;
44:     for (LineItem item : order.items()) {
45:         BigDecimal price = item.unitPrice().multiply(BigDecimal.valueOf(item.quantity()));
46:         subtotal = subtotal.add(price);
47:         invoice.addLine(item.sku(), item.quantity(), price);
48:     }
49:     BigDecimal discount = BigDecimal.ZERO;
50:     if (customer.isPremium()) {
51:         discount = subtotal.multiply(PREMIUM_RATE);
52:     }
53:     invoice.setDiscount(discount);
54:     BigDecimal tax = subtotal.subtract(discount).multiply(TAX_RATE);
55:     invoice.setTax(tax);
56:     invoice.setTotal(subtotal.subtract(discount).add(tax));
57:     return invoice;
58: }"
        .to_string(),
        answer: r#"[{"function_name": "addLineItems", "line_start": 43, "line_end": 48}, {"function_name": "premiumDiscount", "line_start": 49, "line_end": 52}, {"function_name": "applyTax", "line_start": 54, "line_end": 56}]"#
            .to_string(),
    }
}

fn short_example() -> FewShotExample {
    FewShotExample {
        method: "\
12: public void greet(User user) {
13:     String name = user.displayName();
14:     if (name == null || name.isBlank()) {
15:         name = user.login();
16:     }
17:     out.println(\"Hello, \" + name);
18: }"
            .to_string(),
        answer: r#"[{"function_name": "resolveDisplayName", "line_start": 13, "line_end": 16}]"#
            .to_string(),
    }
}

/// Everything sent to the model for one host method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PromptBundle {
    pub task_overview: String,
    pub long_method_definition: String,
    pub doc_comment: Option<String>,
    pub few_shot_examples: [FewShotExample; 2],
    pub output_format_instructions: String,
    /// Target method with absolute line numbers.
    pub target_method_source: String,
    /// Where the target lives; not part of the rendered text.
    #[serde(skip)]
    pub target: LineSpan,
    #[serde(skip)]
    pub target_file: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChatMessage {
    pub role: &'static str,
    pub content: String,
}

pub fn build_prompt(method: &LongMethod) -> PromptBundle {
    let mut target = String::new();
    for line in method.start_line()..=method.end_line() {
        let _ = writeln!(target, "{line}: {}", method.line_text(line).unwrap_or(""));
    }
    PromptBundle {
        task_overview: TASK_OVERVIEW.to_string(),
        long_method_definition: LONG_METHOD_DEFINITION.to_string(),
        doc_comment: method.doc_comment().map(str::to_string),
        few_shot_examples: [long_example(), short_example()],
        output_format_instructions: OUTPUT_FORMAT.to_string(),
        target_method_source: target.trim_end().to_string(),
        target: method.span(),
        target_file: method
            .file_path()
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default(),
    }
}

impl PromptBundle {
    pub fn system_message(&self) -> String {
        format!("{}\n\n{}", self.task_overview, self.long_method_definition)
    }

    pub fn user_message(&self) -> String {
        let mut out = String::new();
        for (k, ex) in self.few_shot_examples.iter().enumerate() {
            let _ = write!(
                out,
                "Example {}:\n{}\nAnswer:\n{}\n\n",
                k + 1,
                ex.method,
                ex.answer
            );
        }
        if let Some(doc) = &self.doc_comment {
            let _ = write!(out, "Documentation of the target method:\n{doc}\n\n");
        }
        let _ = write!(
            out,
            "Target method:\n{}\n\n{}",
            self.target_method_source, self.output_format_instructions
        );
        out
    }

    pub fn messages(&self) -> [ChatMessage; 2] {
        [
            ChatMessage {
                role: "system",
                content: self.system_message(),
            },
            ChatMessage {
                role: "user",
                content: self.user_message(),
            },
        ]
    }

    /// The exact text the fixture key is derived from.
    pub fn render(&self) -> String {
        format!(
            "[system]\n{}\n\n[user]\n{}\n",
            self.system_message(),
            self.user_message()
        )
    }
}
