//! Small hand-written PDFs covering the extractor's cases one at a time.

use super::pdf::{Face, LineStyle, PageLine, PageSpec, Segment};

fn line(segments: &[(Face, &str)], style: LineStyle) -> PageLine {
    PageLine {
        segments: segments.iter().map(|&(f, t)| Segment::new(f, t)).collect(),
        paragraph: false,
        style,
    }
}

fn prose_with(mono: Face, style: LineStyle) -> Vec<PageLine> {
    vec![
        line(&[(Face::Helvetica, "Inline code in one face")], LineStyle::Plain),
        line(
            &[(Face::Times, "The "), (mono, "Parser.parse()"), (Face::Times, " method reads input.")],
            style,
        ),
        line(&[(Face::Times, "Call "), (mono, "reset"), (Face::Times, ", then "), (mono, "run(x)"), (Face::Times, ".")], style),
        line(&[(mono, "load_config"), (Face::Times, " starts the line.")], style),
        line(&[(Face::Times, "The line ends with "), (mono, "flush()")], style),
        line(&[(Face::Times, "Plain prose without any code at all.")], style),
    ]
}

fn code_block() -> Vec<PageLine> {
    let mut lines = vec![line(&[(Face::Times, "The listing:")], LineStyle::Plain)];
    for text in [
        "public int score(int x) {",
        "    int acc = x * 2;",
        "    return acc + 1;",
        "}",
    ] {
        lines.push(line(&[(Face::Courier, text)], LineStyle::Plain));
    }
    lines.push(line(&[(Face::Times, "After the listing "), (Face::Courier, "score"), (Face::Times, " is called.")], LineStyle::Kerned));
    lines
}

/// Named page sets, each rendered to its own PDF.
pub fn fixture_suite() -> Vec<(String, Vec<PageSpec>)> {
    let mut out = Vec::new();
    let styles = [
        ("plain", LineStyle::Plain),
        ("kerned", LineStyle::Kerned),
        ("gaps", LineStyle::SpacesAsGaps),
    ];
    let faces = [
        ("courier", Face::Courier),
        ("cmtt", Face::Cmtt),
        ("lmmono", Face::LmMono),
        ("flagged", Face::FlaggedFixed),
    ];
    for (fname, face) in faces {
        for (sname, style) in styles {
            out.push((
                format!("{fname}-{sname}"),
                vec![PageSpec {
                    lines: prose_with(face, style),
                    in_form: false,
                }],
            ));
        }
    }
    out.push((
        "form-xobject".into(),
        vec![PageSpec {
            lines: prose_with(Face::Courier, LineStyle::Plain),
            in_form: true,
        }],
    ));
    out.push((
        "multi-page".into(),
        vec![
            PageSpec {
                lines: prose_with(Face::Cmtt, LineStyle::Kerned),
                in_form: false,
            },
            PageSpec {
                lines: code_block(),
                in_form: true,
            },
            PageSpec {
                lines: prose_with(Face::FlaggedFixed, LineStyle::SpacesAsGaps),
                in_form: false,
            },
        ],
    ));
    out.push((
        "code-block".into(),
        vec![PageSpec {
            lines: code_block(),
            in_form: false,
        }],
    ));
    out.push((
        "punctuation".into(),
        vec![PageSpec {
            lines: vec![
                line(&[(Face::Times, "("), (Face::LmMono, "x.y"), (Face::Times, "), and <"), (Face::LmMono, "a&b"), (Face::Times, ">")], LineStyle::Plain),
                line(&[(Face::Times, "Quotes: \""), (Face::Courier, "'q'"), (Face::Times, "\" and 100% done.")], LineStyle::Kerned),
                line(&[(Face::Courier, "{ [ ] }"), (Face::Times, " braces")], LineStyle::SpacesAsGaps),
            ],
            in_form: false,
        }],
    ));
    out.push((
        "blank-page".into(),
        vec![
            PageSpec {
                lines: prose_with(Face::Courier, LineStyle::Plain),
                in_form: false,
            },
            PageSpec::default(),
        ],
    ));
    out
}
