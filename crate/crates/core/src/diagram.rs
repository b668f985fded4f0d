//! Plain-text sequence diagrams from execution traces.
//!
//! ```text
//! @diagram <title>
//! participant <lifeline>
//! <from> -> <to> : <label>(<parameters>)
//! @end
//! ```

use std::fmt::Write;

use crate::engine::{render_parameters, ExecutionTrace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub from: String,
    pub to: String,
    pub label: String,
    /// Parameter values in scenario-file syntax, timestamps relative to now.
    pub parameters: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceDiagram {
    pub title: String,
    pub lifelines: Vec<String>,
    pub messages: Vec<Message>,
}

/// One message per trace step. Lifelines appear in order of first use, the
/// sender ahead of the receiver.
pub fn trace_to_diagram(trace: &ExecutionTrace, title: &str) -> SequenceDiagram {
    let mut lifelines: Vec<String> = Vec::new();
    let mut messages = Vec::with_capacity(trace.steps.len());
    for step in &trace.steps {
        let event = &step.event;
        let from = event.sender.qualified();
        let to = event.receiver.qualified();
        for name in [&from, &to] {
            if !lifelines.contains(name) {
                lifelines.push(name.clone());
            }
        }
        messages.push(Message {
            from,
            to,
            label: event.label.clone(),
            parameters: render_parameters(&event.parameters, trace.now),
        });
    }
    SequenceDiagram {
        title: title.to_string(),
        lifelines,
        messages,
    }
}

pub fn render(diagram: &SequenceDiagram) -> String {
    let mut out = format!("@diagram {}\n", diagram.title);
    for lifeline in &diagram.lifelines {
        let _ = writeln!(out, "participant {lifeline}");
    }
    for m in &diagram.messages {
        let _ = writeln!(out, "{} -> {} : {}({})", m.from, m.to, m.label, m.parameters);
    }
    out.push_str("@end\n");
    out
}

/// `<title>.seq.txt`
pub fn file_name(title: &str) -> String {
    format!("{title}.seq.txt")
}
