//! Canonical JSON rendering for point documents: keys sorted, every float
//! printed with 17 significant digits (`{:.16e}`), two-space indentation.
//! Loading a canonical document and saving it again reproduces the bytes,
//! since 17 digits round-trip an `f64` exactly.

use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub enum Node {
    Float(f64),
    Int(u64),
    Text(String),
    List(Vec<Node>),
    Map(BTreeMap<String, Node>),
}

impl Node {
    pub fn complex(re: f64, im: f64) -> Node {
        Node::List(vec![Node::Float(re), Node::Float(im)])
    }

    pub fn floats(values: &[f64]) -> Node {
        Node::List(values.iter().map(|v| Node::Float(*v)).collect())
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        match self {
            Node::Float(v) => out.push_str(&format!("{v:.16e}")),
            Node::Int(v) => out.push_str(&v.to_string()),
            Node::Text(s) => {
                out.push('"');
                for ch in s.chars() {
                    match ch {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Node::List(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                    item.render_into(out, indent + 1);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push(']');
            }
            Node::Map(map) => {
                if map.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (key, value)) in map.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                    out.push('"');
                    out.push_str(key);
                    out.push_str("\": ");
                    value.render_into(out, indent + 1);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push('}');
            }
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out.push('\n');
        out
    }
}

pub fn map(entries: Vec<(&str, Node)>) -> Node {
    Node::Map(
        entries
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_sort_and_floats_are_sixteen_digit() {
        let node = map(vec![
            ("zeta", Node::Float(0.5)),
            ("alpha", Node::Int(1)),
            ("list", Node::floats(&[1.0, -0.25])),
        ]);
        let text = node.render();
        let alpha = text.find("alpha").unwrap();
        let list = text.find("list").unwrap();
        let zeta = text.find("zeta").unwrap();
        assert!(alpha < list && list < zeta);
        assert!(text.contains("5.0000000000000000e-1"));
        assert!(text.contains("-2.5000000000000000e-1"));
    }

    #[test]
    fn seventeen_digits_roundtrip_exactly() {
        for v in [std::f64::consts::PI, 1.0 / 3.0, -7.25e-13, 6.02e23] {
            let printed = format!("{v:.16e}");
            let back: f64 = printed.parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits());
        }
    }
}
