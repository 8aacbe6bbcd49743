//! Proptest strategies for valid link sets.

use proptest::collection::{btree_map, vec};
use proptest::prelude::*;
use scisoftx_core::digest::sha256_hex;
use scisoftx_core::links::link_id;
use scisoftx_core::{Label, Link, LinkSet, LinkerParams, Origin};

fn digest() -> impl Strategy<Value = String> {
    any::<u64>().prop_map(|n| sha256_hex(&n.to_le_bytes()))
}

/// Text XML can carry, with the characters that need escaping well represented.
fn xml_text(min: usize, max: usize) -> impl Strategy<Value = String> {
    let special = prop::sample::select(vec!['&', '<', '>', '"', '\'', '\t', '\n', '\r', ' ', ']', 'é', '→', '𝔸']);
    let plain = prop::char::range(' ', '~');
    let any_xml = any::<char>().prop_filter("XML 1.0 character", |&c| scisoftx_core::links::is_xml_char(c));
    vec(prop_oneof![4 => plain, 2 => special, 1 => any_xml], min..=max).prop_map(|cs| cs.into_iter().collect())
}

fn label() -> impl Strategy<Value = Label> {
    prop::sample::select(Label::ALL.to_vec())
}

type Key = (u32, u32, u32, String);

fn link_body() -> impl Strategy<Value = (String, String, u32, Label, bool, u32)> {
    (
        xml_text(1, 12),
        xml_text(0, 20),
        1u32..10_000,
        label(),
        any::<bool>(),
        prop_oneof![Just(0u32), any::<u32>()],
    )
}

pub fn link_set() -> impl Strategy<Value = LinkSet> {
    let key = (1u32..50, 1u32..80, 0u32..200, xml_text(1, 24));
    let params = prop::option::of(
        (0usize..64, 1u32..10, 0.0f64..=1.0, 1usize..8, vec("[A-Za-z_][A-Za-z0-9_]{0,8}", 0..6)).prop_map(
            |(context_window, block_min_lines, block_monospace_ratio, min_token_len, stoplist)| LinkerParams {
                context_window,
                block_min_lines,
                block_monospace_ratio,
                min_token_len,
                stoplist,
            },
        ),
    );
    (digest(), digest(), params, btree_map(key, link_body(), 0..12)).prop_map(|(doc, code, params, entries)| {
        let links = entries.into_iter().map(|((page, line, start, qname), (snippet, file, tline, label, manual, score)): (Key, _)| {
            let end = start + snippet.chars().count() as u32;
            Link {
                link_id: link_id(page, line, start, end, &qname),
                page,
                line,
                char_start: start,
                char_end: end,
                snippet,
                target_qname: qname,
                target_file: file,
                target_line: tline,
                label,
                origin: if manual { Origin::Manual } else { Origin::Auto },
                score: if manual { 0 } else { score },
            }
        });
        let mut set = LinkSet::from_links(doc, code, links).expect("generated links are valid");
        set.linker_params = params;
        set
    })
}
