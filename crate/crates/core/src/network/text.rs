//! Line-oriented model description.
//!
//! ```text
//! # comment
//! net name=vgg16_desk
//! input c=3 h=32 w=32
//! conv out=16 k=3 s=1 p=1      (or kh=/kw= for non-square filters)
//! maxpool k=2
//! avgpool kh=2 kw=1
//! relu
//! leaky_relu slope=0.1
//! batchnorm
//! pad p=1
//! ```
//! `s` defaults to 1 and `p` to 0. The `net` line is optional.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::spec::NetworkSpec;
use crate::layers::{ActivationKind, ConvSpec, LayerSpec, PoolMode, PoolWindow};
use crate::sparse::Dims3;
use crate::{Error, Result};

struct Line<'a> {
    number: usize,
    keyword: &'a str,
    args: BTreeMap<&'a str, &'a str>,
}

impl<'a> Line<'a> {
    fn parse(number: usize, text: &'a str) -> Result<Option<Self>> {
        let text = text.split('#').next().unwrap_or("").trim();
        let mut tokens = text.split_whitespace();
        let Some(keyword) = tokens.next() else {
            return Ok(None);
        };
        let mut args = BTreeMap::new();
        for tok in tokens {
            let (k, v) = tok.split_once('=').ok_or_else(|| Error::Parse {
                line: number,
                message: format!("expected key=value, found {tok:?}"),
            })?;
            if args.insert(k, v).is_some() {
                return Err(Error::Parse {
                    line: number,
                    message: format!("duplicate key {k:?}"),
                });
            }
        }
        Ok(Some(Line {
            number,
            keyword,
            args,
        }))
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.number,
            message: message.into(),
        }
    }

    fn take(&mut self, key: &str) -> Option<&'a str> {
        self.args.remove(key)
    }

    fn uint(&mut self, key: &str) -> Result<Option<usize>> {
        self.take(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| self.err(format!("{key}={v:?} is not a non-negative integer")))
            })
            .transpose()
    }

    fn required(&mut self, key: &str) -> Result<usize> {
        self.uint(key)?
            .ok_or_else(|| self.err(format!("{} needs {key}=", self.keyword)))
    }

    /// Either `k=` or both `kh=` and `kw=`.
    fn kernel(&mut self, key: &str) -> Result<(usize, usize)> {
        match (self.uint(key)?, self.uint(&format!("{key}h"))?, self.uint(&format!("{key}w"))?) {
            (Some(k), None, None) => Ok((k, k)),
            (None, Some(h), Some(w)) => Ok((h, w)),
            _ => Err(self.err(format!("give either {key}= or both {key}h= and {key}w="))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.args.keys().next() {
            Some(k) => Err(self.err(format!("unexpected key {k:?} for {}", self.keyword))),
            None => Ok(()),
        }
    }
}

fn parse_layer(line: &mut Line<'_>) -> Result<LayerSpec> {
    Ok(match line.keyword {
        "conv" => {
            let out_channels = line.required("out")?;
            let (kernel_h, kernel_w) = line.kernel("k")?;
            LayerSpec::Conv(ConvSpec {
                out_channels,
                kernel_h,
                kernel_w,
                stride: line.uint("s")?.unwrap_or(1),
                padding: line.uint("p")?.unwrap_or(0),
            })
        }
        "maxpool" | "avgpool" => {
            let (h, w) = line.kernel("k")?;
            let mode = if line.keyword == "maxpool" {
                PoolMode::Max
            } else {
                PoolMode::Avg
            };
            LayerSpec::Pool {
                window: PoolWindow { h, w },
                mode,
            }
        }
        "relu" => LayerSpec::Activation(ActivationKind::Relu),
        "leaky_relu" => {
            let raw = line
                .take("slope")
                .ok_or_else(|| line.err("leaky_relu needs slope="))?;
            let slope: f32 = raw
                .parse()
                .map_err(|_| line.err(format!("slope={raw:?} is not a number")))?;
            if !(slope >= 0.0) {
                return Err(line.err(format!("slope {slope} must be >= 0")));
            }
            LayerSpec::Activation(ActivationKind::LeakyRelu { slope })
        }
        "batchnorm" => LayerSpec::BatchNorm,
        "pad" => LayerSpec::Pad {
            padding: line.required("p")?,
        },
        other => return Err(line.err(format!("unknown layer kind {other:?}"))),
    })
}

/// Parses a model description. Shapes are not checked; call
/// [`NetworkSpec::validate`] for that.
pub fn parse_model(text: &str) -> Result<NetworkSpec> {
    let mut name = String::from("model");
    let mut input = None;
    let mut layers = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let Some(mut line) = Line::parse(i + 1, raw)? else {
            continue;
        };
        match line.keyword {
            "net" => {
                if input.is_some() || !layers.is_empty() {
                    return Err(line.err("net line must come before input"));
                }
                name = line
                    .take("name")
                    .ok_or_else(|| line.err("net needs name="))?
                    .to_string();
            }
            "input" => {
                if input.is_some() {
                    return Err(line.err("duplicate input line"));
                }
                input = Some(Dims3::new(
                    line.required("c")?,
                    line.required("h")?,
                    line.required("w")?,
                ));
            }
            _ => {
                if input.is_none() {
                    return Err(line.err("layers must follow the input line"));
                }
                layers.push(parse_layer(&mut line)?);
            }
        }
        line.finish()?;
    }
    let input = input.ok_or_else(|| Error::Parse {
        line: text.lines().count(),
        message: "missing input line".into(),
    })?;
    Ok(NetworkSpec::new(name, input, layers))
}

fn kernel_args(key: &str, h: usize, w: usize) -> String {
    if h == w {
        format!("{key}={h}")
    } else {
        format!("{key}h={h} {key}w={w}")
    }
}

/// Writes `spec` in the format read by [`parse_model`].
pub fn format_model(spec: &NetworkSpec) -> String {
    let mut out = String::new();
    let d = spec.input;
    let _ = writeln!(out, "net name={}", spec.name);
    let _ = writeln!(out, "input c={} h={} w={}", d.c, d.h, d.w);
    for layer in &spec.layers {
        let _ = match layer {
            LayerSpec::Conv(c) => writeln!(
                out,
                "conv out={} {} s={} p={}",
                c.out_channels,
                kernel_args("k", c.kernel_h, c.kernel_w),
                c.stride,
                c.padding
            ),
            LayerSpec::Pool { window, .. } => {
                writeln!(out, "{} {}", layer.kind_name(), kernel_args("k", window.h, window.w))
            }
            LayerSpec::Activation(ActivationKind::LeakyRelu { slope }) => {
                writeln!(out, "leaky_relu slope={slope}")
            }
            LayerSpec::Pad { padding } => writeln!(out, "pad p={padding}"),
            LayerSpec::Activation(ActivationKind::Relu) | LayerSpec::BatchNorm => {
                writeln!(out, "{}", layer.kind_name())
            }
        };
    }
    out
}
