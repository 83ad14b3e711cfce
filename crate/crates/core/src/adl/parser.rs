use std::collections::BTreeSet;

use super::lexer::{Lexer, Tok};
use super::{ParseError, SourceSpan};
use crate::model::{
    ArchitectureModel, Correspondence, Edge, Element, ElementRef, Interval, MetricBinding, MetricKind, Requirement,
    RequirementKind, Scenario, ScenarioKey, Skill, Thresholds, Viewpoint, ViewpointKind,
};

pub(crate) struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    span: SourceSpan,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &'a str, file: &'a str) -> PResult<Self> {
        let mut lexer = Lexer::new(text, file);
        let (tok, span) = lexer.next_token()?;
        Ok(Self { lexer, tok, span })
    }

    fn advance(&mut self) -> PResult<(Tok, SourceSpan)> {
        let (tok, span) = self.lexer.next_token()?;
        let prev_tok = std::mem::replace(&mut self.tok, tok);
        let prev_span = std::mem::replace(&mut self.span, span);
        Ok((prev_tok, prev_span))
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::new(self.span.clone(), format!("unexpected {}", self.tok.describe())).expecting(expected)
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        if self.tok == want {
            self.advance()?;
            Ok(())
        } else {
            Err(self.unexpected(&want.describe()))
        }
    }

    fn at(&self, want: &Tok) -> bool {
        &self.tok == want
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(&self.tok, Tok::Ident(s) if s == word)
    }

    fn expect_word(&mut self, word: &str) -> PResult<()> {
        if self.at_word(word) {
            self.advance()?;
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{word}`")))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match &self.tok {
            Tok::Ident(_) => match self.advance()? {
                (Tok::Ident(s), span) => Ok((s, span)),
                _ => unreachable!(),
            },
            _ => Err(self.unexpected(what)),
        }
    }

    /// Identifier without `.`, used where a dot would make references
    /// ambiguous.
    fn plain_ident(&mut self, what: &str) -> PResult<String> {
        let (id, span) = self.ident(what)?;
        if id.contains('.') {
            return Err(ParseError::new(span, format!("`{id}` may not contain `.`")).expecting(what));
        }
        Ok(id)
    }

    /// `a.b` written either as one identifier or as `a . b`; splits at the
    /// first dot.
    fn dotted(&mut self, what: &str) -> PResult<(String, String)> {
        let (head, span) = self.ident(what)?;
        if let Some((a, b)) = head.split_once('.') {
            if a.is_empty() || b.is_empty() {
                return Err(ParseError::new(span, format!("malformed reference `{head}`")).expecting(what));
            }
            return Ok((a.to_string(), b.to_string()));
        }
        if self.at(&Tok::Dot) {
            self.advance()?;
            let (tail, _) = self.ident(what)?;
            return Ok((head, tail));
        }
        Err(ParseError::new(span, format!("`{head}` is not a dotted reference")).expecting(what))
    }

    fn real(&mut self) -> PResult<f64> {
        match &self.tok {
            Tok::Number(n) => {
                let n = *n;
                self.advance()?;
                Ok(n)
            }
            Tok::Ident(s) if s == "inf" => {
                self.advance()?;
                Ok(f64::INFINITY)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn string(&mut self) -> PResult<String> {
        match &self.tok {
            Tok::Str(_) => match self.advance()? {
                (Tok::Str(s), _) => Ok(s),
                _ => unreachable!(),
            },
            _ => Err(self.unexpected("a string")),
        }
    }

    pub(crate) fn model(&mut self) -> PResult<ArchitectureModel> {
        let mut model = ArchitectureModel::new();
        loop {
            let keyword = match &self.tok {
                Tok::Eof => return Ok(model),
                Tok::Ident(s) => s.clone(),
                _ => return Err(self.unexpected("`viewpoint`, `correspondence`, `requirement` or `scenario`")),
            };
            match keyword.as_str() {
                "viewpoint" => model.viewpoints.push(self.viewpoint()?),
                "correspondence" => model.correspondences.push(self.correspondence()?),
                "requirement" => model.requirements.push(self.requirement()?),
                "scenario" => model.scenarios.push(self.scenario()?),
                _ => {
                    return Err(ParseError::new(self.span.clone(), format!("unknown item `{keyword}`"))
                        .expecting("`viewpoint`, `correspondence`, `requirement` or `scenario`"))
                }
            }
        }
    }

    fn viewpoint(&mut self) -> PResult<Viewpoint> {
        self.expect_word("viewpoint")?;
        let (kind_word, kind_span) = self.ident("a viewpoint kind")?;
        let kind = ViewpointKind::from_keyword(&kind_word).ok_or_else(|| {
            ParseError::new(kind_span, format!("unknown viewpoint kind `{kind_word}`"))
                .expecting("`functional`, `capability`, `software` or `hardware`")
        })?;
        let id = self.plain_ident("a viewpoint id")?;
        let mut vp = Viewpoint::new(kind, id);
        self.expect(Tok::LBrace)?;
        loop {
            match &self.tok {
                Tok::RBrace => {
                    self.advance()?;
                    return Ok(vp);
                }
                Tok::Ident(w) if w == "node" => {
                    self.advance()?;
                    let (id, _) = self.ident("a node id")?;
                    self.expect(Tok::Semi)?;
                    vp.nodes.push(Element::new(id));
                }
                Tok::Ident(w) if w == "edge" => {
                    self.advance()?;
                    let (source, _) = self.ident("an element id")?;
                    self.expect(Tok::Arrow)?;
                    let (target, _) = self.ident("an element id")?;
                    let label = if self.at(&Tok::Colon) {
                        self.advance()?;
                        Some(self.ident("an edge label")?.0)
                    } else {
                        None
                    };
                    self.expect(Tok::Semi)?;
                    vp.edges.insert(Edge { source, target, label });
                }
                Tok::Ident(w) if w == "skill" => vp.skills.push(self.skill()?),
                Tok::Ident(w) => {
                    return Err(ParseError::new(self.span.clone(), format!("unknown viewpoint item `{w}`"))
                        .expecting("`node`, `edge`, `skill` or `}`"))
                }
                _ => return Err(self.unexpected("`node`, `edge`, `skill` or `}`")),
            }
        }
    }

    fn skill(&mut self) -> PResult<Skill> {
        self.expect_word("skill")?;
        let (id, _) = self.ident("a skill id")?;
        let mut skill = Skill::new(id);
        if self.at_word("requires") {
            self.advance()?;
            skill.requires.insert(self.ident("a skill id")?.0);
            while self.at(&Tok::Comma) {
                self.advance()?;
                skill.requires.insert(self.ident("a skill id")?.0);
            }
        }
        if self.at_word("thresholds") {
            self.advance()?;
            let degraded = self.real()?;
            let unavailable = self.real()?;
            skill.thresholds = Some(Thresholds { degraded, unavailable });
        }
        if self.at_word("text") {
            self.advance()?;
            skill.description = self.string()?;
        }
        while self.at_word("metric") {
            self.advance()?;
            skill.metric_bindings.push(self.metric()?);
        }
        if !self.at(&Tok::Semi) {
            return Err(self.unexpected("`requires`, `thresholds`, `text`, `metric` or `;`"));
        }
        self.advance()?;
        Ok(skill)
    }

    fn interval(&mut self) -> PResult<Interval> {
        self.expect(Tok::LBracket)?;
        let lo = self.real()?;
        self.expect(Tok::Comma)?;
        let hi = self.real()?;
        self.expect(Tok::RBracket)?;
        Ok(Interval { lo, hi })
    }

    fn metric(&mut self) -> PResult<MetricBinding> {
        let (source, metric) = self.dotted("`<source>.<metric>`")?;
        let (kind_word, kind_span) = self.ident("a metric kind")?;
        let kind = MetricKind::from_keyword(&kind_word).ok_or_else(|| {
            ParseError::new(kind_span, format!("unknown metric kind `{kind_word}`"))
                .expecting("`heartbeat`, `counter` or `scalar`")
        })?;
        self.expect_word("nominal")?;
        let nominal = self.interval()?;
        self.expect_word("unavailable")?;
        let unavailable = self.interval()?;
        let timeout = if self.at_word("timeout") {
            self.advance()?;
            Some(self.real()?)
        } else {
            None
        };
        Ok(MetricBinding {
            source,
            metric,
            kind,
            nominal,
            unavailable,
            timeout,
        })
    }

    fn correspondence(&mut self) -> PResult<Correspondence> {
        self.expect_word("correspondence")?;
        let (id, _) = self.ident("a correspondence id")?;
        let from = self.plain_ident("a viewpoint id")?;
        self.expect(Tok::Arrow)?;
        let to = self.plain_ident("a viewpoint id")?;
        let mut corr = Correspondence::new(id, from, to);
        self.expect(Tok::LBrace)?;
        while !self.at(&Tok::RBrace) {
            let (a, _) = self.ident("an element id or `}`")?;
            self.expect(Tok::FatArrow)?;
            corr.pairs.insert((a.clone(), self.ident("an element id")?.0));
            while self.at(&Tok::Comma) {
                self.advance()?;
                corr.pairs.insert((a.clone(), self.ident("an element id")?.0));
            }
            self.expect(Tok::Semi)?;
        }
        self.advance()?;
        Ok(corr)
    }

    fn requirement(&mut self) -> PResult<Requirement> {
        self.expect_word("requirement")?;
        let (id, _) = self.ident("a requirement id")?;
        let (kind_word, kind_span) = self.ident("a requirement kind")?;
        let kind = RequirementKind::from_keyword(&kind_word).ok_or_else(|| {
            ParseError::new(kind_span, format!("unknown requirement kind `{kind_word}`"))
                .expecting("`safety_goal`, `hazard`, `rms` or `functional`")
        })?;
        self.expect_word("on")?;
        let mut anchors = BTreeSet::new();
        let (vp, el) = self.dotted("`<viewpoint>.<element>`")?;
        anchors.insert(ElementRef::new(vp, el));
        while self.at(&Tok::Comma) {
            self.advance()?;
            let (vp, el) = self.dotted("`<viewpoint>.<element>`")?;
            anchors.insert(ElementRef::new(vp, el));
        }
        self.expect_word("text")?;
        let text = self.string()?;
        self.expect(Tok::Semi)?;
        Ok(Requirement { id, kind, text, anchors })
    }

    fn scenario(&mut self) -> PResult<Scenario> {
        self.expect_word("scenario")?;
        let (id, _) = self.ident("a scenario id")?;
        let mut scenario = Scenario::new(id);
        self.expect(Tok::LBrace)?;
        while !self.at(&Tok::RBrace) {
            let (name, span) = self.ident("a scenario key or `}`")?;
            let key = ScenarioKey::from_name(&name).ok_or_else(|| {
                let known: Vec<_> = ScenarioKey::ALL.iter().map(|k| k.name()).collect();
                ParseError::new(span.clone(), format!("unknown scenario key `{name}`")).expecting(&known.join(", "))
            })?;
            if scenario.params.contains_key(&key) {
                return Err(ParseError::new(span, format!("scenario key `{name}` given twice")));
            }
            self.expect(Tok::Eq)?;
            let value = self.real()?;
            self.expect(Tok::Semi)?;
            scenario.params.insert(key, value);
        }
        self.advance()?;
        Ok(scenario)
    }
}
