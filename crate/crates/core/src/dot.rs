//! Minimal Graphviz DOT emitter shared by the tree and network exporters.

use std::fmt::Write;

pub(crate) fn escape(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for ch in label.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) struct DotWriter {
    buf: String,
}

impl DotWriter {
    pub fn new(name: &str, defaults: &[(&str, &str)]) -> Self {
        let mut buf = format!("digraph {name} {{\n");
        if !defaults.is_empty() {
            let _ = writeln!(buf, "  node [{}];", attrs(defaults));
        }
        DotWriter { buf }
    }

    pub fn node(&mut self, id: &str, label: &str, extra: &[(&str, &str)]) {
        let mut list = vec![("label", label)];
        list.extend_from_slice(extra);
        let _ = writeln!(self.buf, "  {id} [{}];", attrs(&list));
    }

    pub fn edge(&mut self, from: &str, to: &str, label: Option<&str>) {
        match label {
            Some(l) => {
                let _ = writeln!(self.buf, "  {from} -> {to} [{}];", attrs(&[("label", l)]));
            }
            None => {
                let _ = writeln!(self.buf, "  {from} -> {to};");
            }
        }
    }

    pub fn finish(mut self) -> String {
        self.buf.push_str("}\n");
        self.buf
    }
}

fn attrs(list: &[(&str, &str)]) -> String {
    list.iter()
        .map(|(k, v)| format!("{k}=\"{}\"", escape(v)))
        .collect::<Vec<_>>()
        .join(", ")
}
