//! Recursive-descent parser for terms, formulas and the three file kinds.

use super::ast::*;
use super::lexer::{tokenize, LexError, Span, Tok, Token};
use crate::metalogic::{Quant, Restriction};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: syntax error: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> Self {
        ParseError {
            span: e.span,
            message: e.message,
        }
    }
}

pub type PResult<T> = Result<T, ParseError>;

const KEYWORDS: &[&str] = &["forall", "exists", "nabla", "true", "false", "pi"];

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        let found = match self.peek() {
            Tok::Eof => "end of input".to_string(),
            t => format!("'{t}'"),
        };
        Err(ParseError {
            span: self.span(),
            message: format!("unexpected {found}, expected {expected}"),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> PResult<Span> {
        if self.peek() == t {
            Ok(self.bump().span)
        } else {
            self.error(&format!("'{t}'"))
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            self.error(&format!("'{w}'"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error("an identifier"),
        }
    }

    fn name_list(&mut self) -> PResult<Vec<String>> {
        let mut out = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    // Types

    pub fn ty(&mut self) -> PResult<TyAst> {
        let a = match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(&Tok::RParen)?;
                t
            }
            Tok::Ident(s) => {
                let sp = self.bump().span;
                TyAst::Name(s, sp)
            }
            _ => return self.error("a type"),
        };
        if self.eat(&Tok::Arrow) {
            Ok(TyAst::Arrow(Box::new(a), Box::new(self.ty()?)))
        } else {
            Ok(a)
        }
    }

    // Terms

    fn lam_start(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_)) && (*self.peek_at(1) == Tok::Backslash || *self.peek_at(1) == Tok::Colon)
    }

    pub fn term(&mut self) -> PResult<TermAst> {
        self.infix(1)
    }

    fn infix(&mut self, level: u8) -> PResult<TermAst> {
        if level > 3 {
            return self.app();
        }
        let lhs = self.infix(level + 1)?;
        let op = match (level, self.peek()) {
            (1, Tok::DArrow) => "=>",
            (2, Tok::Amp) => "&",
            (3, Tok::Cons) => "::",
            _ => return Ok(lhs),
        };
        if matches!(lhs, TermAst::Lam(..)) {
            return Ok(lhs);
        }
        self.bump();
        let rhs = self.infix(level)?;
        let sp = lhs.span().join(rhs.span());
        Ok(TermAst::Infix(op.to_string(), Box::new(lhs), Box::new(rhs), sp))
    }

    fn lam(&mut self) -> PResult<TermAst> {
        let start = self.span();
        let x = self.ident()?;
        let ty = if self.eat(&Tok::Colon) { Some(self.ty()?) } else { None };
        self.expect(&Tok::Backslash)?;
        let body = self.term()?;
        let sp = start.join(body.span());
        Ok(TermAst::Lam(x, ty, Box::new(body), sp))
    }

    fn app(&mut self) -> PResult<TermAst> {
        if self.lam_start() {
            return self.lam();
        }
        let head = self.atom()?;
        let mut args = Vec::new();
        loop {
            if self.lam_start() {
                args.push(self.lam()?);
                break;
            }
            match self.peek() {
                Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) || s == "pi" => args.push(self.atom()?),
                Tok::LParen => args.push(self.atom()?),
                _ => break,
            }
        }
        if args.is_empty() {
            return Ok(head);
        }
        let sp = head.span().join(args.last().unwrap().span());
        Ok(TermAst::App(Box::new(head), args, sp))
    }

    fn atom(&mut self) -> PResult<TermAst> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) || s == "pi" => {
                let sp = self.bump().span;
                Ok(TermAst::Name(s, sp))
            }
            Tok::LParen => {
                let start = self.bump().span;
                let op = match self.peek() {
                    Tok::DArrow => Some("=>"),
                    Tok::Amp => Some("&"),
                    Tok::Cons => Some("::"),
                    _ => None,
                };
                if let (Some(op), Tok::RParen) = (op, self.peek_at(1)) {
                    self.bump();
                    let end = self.bump().span;
                    return Ok(TermAst::Name(op.to_string(), start.join(end)));
                }
                let t = self.term()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            _ => self.error("a term"),
        }
    }

    // Formulas

    pub fn formula(&mut self) -> PResult<FormulaAst> {
        let q = match self.peek() {
            Tok::Ident(s) if s == "forall" => Some(Quant::Forall),
            Tok::Ident(s) if s == "exists" => Some(Quant::Exists),
            Tok::Ident(s) if s == "nabla" => Some(Quant::Nabla),
            _ => None,
        };
        if let Some(q) = q {
            let start = self.bump().span;
            let binders = self.binders()?;
            self.expect(&Tok::Comma)?;
            let body = self.formula()?;
            let sp = start.join(body.span());
            return Ok(FormulaAst::Quant(q, binders, Box::new(body), sp));
        }
        let lhs = self.disj()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(FormulaAst::Imp(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn binders(&mut self) -> PResult<Vec<Binder>> {
        let mut out = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                    self.bump();
                    out.push(Binder { name: s, ty: None });
                }
                Tok::LParen => {
                    self.bump();
                    let mut ns = vec![self.ident()?];
                    while let Tok::Ident(_) = self.peek() {
                        ns.push(self.ident()?);
                    }
                    self.expect(&Tok::Colon)?;
                    let ty = self.ty()?;
                    self.expect(&Tok::RParen)?;
                    out.extend(ns.into_iter().map(|name| Binder {
                        name,
                        ty: Some(ty.clone()),
                    }));
                }
                _ => break,
            }
        }
        if out.is_empty() {
            return self.error("a binder");
        }
        Ok(out)
    }

    fn disj(&mut self) -> PResult<FormulaAst> {
        let mut lhs = self.conj()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conj()?;
            lhs = FormulaAst::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> PResult<FormulaAst> {
        let mut lhs = self.base()?;
        while self.eat(&Tok::And) {
            let rhs = self.base()?;
            lhs = FormulaAst::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn restriction(&mut self) -> Restriction {
        match *self.peek() {
            Tok::At(k) => {
                self.bump();
                Restriction::Equal(k)
            }
            Tok::Star(k) => {
                self.bump();
                Restriction::Smaller(k)
            }
            _ => Restriction::None,
        }
    }

    fn base(&mut self) -> PResult<FormulaAst> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "true" => Ok(FormulaAst::True(self.bump().span)),
            Tok::Ident(s) if s == "false" => Ok(FormulaAst::False(self.bump().span)),
            Tok::Ident(s) if s == "forall" || s == "exists" || s == "nabla" => self.formula(),
            Tok::LBrace => {
                let start = self.bump().span;
                let mut items = vec![self.term()?];
                while self.eat(&Tok::Comma) {
                    items.push(self.term()?);
                }
                let (ctx, goal) = if self.eat(&Tok::Turnstile) {
                    (items, self.term()?)
                } else if items.len() == 1 {
                    (Vec::new(), items.pop().unwrap())
                } else {
                    return self.error("'|-'");
                };
                let end = self.expect(&Tok::RBrace)?;
                let res = self.restriction();
                Ok(FormulaAst::Spec {
                    ctx,
                    goal,
                    res,
                    span: start.join(end),
                })
            }
            Tok::LParen => {
                // Either a parenthesized formula or a term starting with '('.
                let save = self.pos;
                self.bump();
                if let Ok(f) = self.formula() {
                    if self.eat(&Tok::RParen) && !matches!(self.peek(), Tok::Eq | Tok::Ident(_) | Tok::LParen) {
                        return Ok(f);
                    }
                }
                self.pos = save;
                self.term_formula()
            }
            _ => self.term_formula(),
        }
    }

    fn term_formula(&mut self) -> PResult<FormulaAst> {
        let t = self.term()?;
        if self.eat(&Tok::Eq) {
            let u = self.term()?;
            let sp = t.span().join(u.span());
            return Ok(FormulaAst::Eq(t, u, sp));
        }
        let res = self.restriction();
        let sp = if res == Restriction::None {
            t.span()
        } else {
            t.span().join(self.prev_span())
        };
        Ok(FormulaAst::Atom(t, res, sp))
    }

    // Commands

    fn end(&mut self) -> PResult<Span> {
        self.expect(&Tok::Dot)
    }

    pub fn command(&mut self) -> PResult<Command> {
        let start = self.span();
        let word = match self.peek().clone() {
            Tok::Ident(w) => w,
            _ => return self.error("a command"),
        };
        self.bump();
        let kind = match word.as_str() {
            "Specification" => match self.peek().clone() {
                Tok::Str(s) => {
                    self.bump();
                    CommandKind::Specification(s)
                }
                _ => return self.error("a quoted specification name"),
            },
            "Kind" => {
                let ns = self.name_list()?;
                self.expect_word("type")?;
                CommandKind::Kind(ns)
            }
            "Type" => {
                let ns = self.name_list()?;
                CommandKind::Type(ns, self.ty()?)
            }
            "Define" => self.define()?,
            "Theorem" | "Lemma" => {
                let n = self.ident()?;
                self.expect(&Tok::Colon)?;
                CommandKind::Theorem(n, self.formula()?)
            }
            "Query" => CommandKind::Query(self.term()?),
            "Set" => {
                let k = self.ident()?;
                let v = match self.peek().clone() {
                    Tok::Num(n) => {
                        self.bump();
                        SetValue::Num(n)
                    }
                    Tok::Ident(w) => {
                        self.bump();
                        SetValue::Word(w)
                    }
                    _ => return self.error("an option value"),
                };
                CommandKind::Set(k, v)
            }
            "Quit" => CommandKind::Quit,
            _ => CommandKind::Tactic(self.tactic(&word)?),
        };
        let end = self.end()?;
        Ok(Command {
            kind,
            span: start.join(end),
        })
    }

    fn define(&mut self) -> PResult<CommandKind> {
        let mut preds = Vec::new();
        loop {
            let p = self.ident()?;
            self.expect(&Tok::Colon)?;
            preds.push((p, self.ty()?));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect_word("by")?;
        let mut clauses = Vec::new();
        if *self.peek() == Tok::Dot {
            return Ok(CommandKind::Define(preds, clauses));
        }
        loop {
            let start = self.span();
            let mut nablas = Vec::new();
            if self.eat_word("nabla") {
                while let Tok::Ident(_) = self.peek() {
                    nablas.push(self.ident()?);
                }
                if nablas.is_empty() {
                    return self.error("a binder");
                }
                self.expect(&Tok::Comma)?;
            }
            let head = self.term()?;
            let body = if self.eat(&Tok::ColonEq) {
                Some(self.formula()?)
            } else {
                None
            };
            clauses.push(ClauseAst {
                nablas,
                head,
                body,
                span: start.join(self.prev_span()),
            });
            if !self.eat(&Tok::Semi) {
                break;
            }
        }
        Ok(CommandKind::Define(preds, clauses))
    }

    fn hyp_names(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        while let Tok::Ident(s) = self.peek().clone() {
            self.bump();
            out.push(s);
        }
        out
    }

    fn tactic(&mut self, word: &str) -> PResult<TacticAst> {
        Ok(match word {
            "induction" => {
                self.expect_word("on")?;
                let mut ns = Vec::new();
                while let Tok::Num(n) = *self.peek() {
                    self.bump();
                    ns.push(n as usize);
                }
                if ns.is_empty() {
                    return self.error("an argument number");
                }
                TacticAst::Induction(ns)
            }
            "intros" => TacticAst::Intros(self.hyp_names()),
            "case" => {
                let hyp = self.ident()?;
                let mut keep = false;
                if *self.peek() == Tok::LParen && matches!(self.peek_at(1), Tok::Ident(s) if s == "keep") {
                    self.bump();
                    self.bump();
                    self.expect(&Tok::RParen)?;
                    keep = true;
                }
                TacticAst::Case { hyp, keep }
            }
            "apply" => {
                let target = self.ident()?;
                let mut args = Vec::new();
                if self.eat_word("to") {
                    while let Tok::Ident(s) = self.peek().clone() {
                        if s == "with" {
                            break;
                        }
                        self.bump();
                        args.push(if s == "_" { None } else { Some(s) });
                    }
                }
                let mut withs = Vec::new();
                if self.eat_word("with") {
                    loop {
                        let x = self.ident()?;
                        self.expect(&Tok::Eq)?;
                        withs.push((x, self.term()?));
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                TacticAst::Apply { target, args, withs }
            }
            "search" => match *self.peek() {
                Tok::Num(n) => {
                    self.bump();
                    TacticAst::Search(Some(n))
                }
                _ => TacticAst::Search(None),
            },
            "split" => TacticAst::Split,
            "left" => TacticAst::Left,
            "right" => TacticAst::Right,
            "exists" | "witness" => TacticAst::Exists(self.term()?),
            "assert" => TacticAst::Assert(self.formula()?),
            "unfold" => TacticAst::Unfold,
            "inst" => {
                let hyp = self.ident()?;
                self.expect_word("with")?;
                let nominal = self.ident()?;
                self.expect(&Tok::Eq)?;
                TacticAst::Inst {
                    hyp,
                    nominal,
                    term: self.term()?,
                }
            }
            "cut" => {
                let hyp = self.ident()?;
                self.expect_word("with")?;
                TacticAst::Cut {
                    hyp,
                    with: self.ident()?,
                }
            }
            "monotone" => {
                let hyp = self.ident()?;
                self.expect_word("with")?;
                TacticAst::Monotone { hyp, ctx: self.term()? }
            }
            "clear" => {
                let hs = self.hyp_names();
                if hs.is_empty() {
                    return self.error("a hypothesis name");
                }
                TacticAst::Clear(hs)
            }
            "undo" => TacticAst::Undo,
            "abort" => TacticAst::Abort,
            _ => {
                self.pos -= 1;
                return self.error("a command or tactic");
            }
        })
    }

    // Specification files

    pub fn sig_file(&mut self) -> PResult<SigFile> {
        self.expect_word("sig")?;
        let name = self.ident()?;
        self.end()?;
        let mut decls = Vec::new();
        while !self.at_eof() {
            if self.eat_word("kind") {
                let ns = self.name_list()?;
                self.expect_word("type")?;
                decls.push(SigDecl::Kind(ns));
            } else if self.eat_word("type") {
                let ns = self.name_list()?;
                decls.push(SigDecl::Type(ns, self.ty()?));
            } else if self.eat_word("end") {
                continue;
            } else {
                return self.error("'kind' or 'type'");
            }
            self.end()?;
        }
        Ok(SigFile { name, decls })
    }

    pub fn mod_file(&mut self) -> PResult<ModFile> {
        self.expect_word("module")?;
        let name = self.ident()?;
        self.end()?;
        let mut clauses = Vec::new();
        while !self.at_eof() {
            if self.eat_word("end") {
                continue;
            }
            let start = self.span();
            let head = self.term()?;
            let mut body = Vec::new();
            if self.eat(&Tok::ColonDash) {
                body.push(self.term()?);
                while self.eat(&Tok::Comma) {
                    body.push(self.term()?);
                }
            }
            let end = self.end()?;
            clauses.push(ModClause {
                head,
                body,
                span: start.join(end),
            });
        }
        Ok(ModFile { name, clauses })
    }

    fn finish<T>(&mut self, v: T) -> PResult<T> {
        if self.at_eof() {
            Ok(v)
        } else {
            self.error("end of input")
        }
    }
}

pub fn parse_term(src: &str) -> PResult<TermAst> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish(t)
}

pub fn parse_formula(src: &str) -> PResult<FormulaAst> {
    let mut p = Parser::new(src)?;
    let f = p.formula()?;
    p.finish(f)
}

pub fn parse_ty(src: &str) -> PResult<TyAst> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.finish(t)
}

pub fn parse_command(src: &str) -> PResult<Command> {
    let mut p = Parser::new(src)?;
    let c = p.command()?;
    p.finish(c)
}

pub fn parse_commands(src: &str) -> PResult<Vec<Command>> {
    let mut p = Parser::new(src)?;
    let mut out = Vec::new();
    while !p.at_eof() {
        out.push(p.command()?);
    }
    Ok(out)
}

pub fn parse_sig(src: &str) -> PResult<SigFile> {
    Parser::new(src)?.sig_file()
}

pub fn parse_mod(src: &str) -> PResult<ModFile> {
    Parser::new(src)?.mod_file()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip_f(s: &str) {
        let f = parse_formula(s).unwrap();
        let printed = f.to_string();
        assert_eq!(parse_formula(&printed).unwrap(), f, "{s} printed as {printed}");
    }

    #[test]
    fn example_term() {
        let t = parse_term("abs (arr i i) (f\\ abs i (x\\ app f x))").unwrap();
        assert_eq!(t.to_string(), "abs (arr i i) (f\\ abs i (x\\ app f x))");
        let (h, args) = t.spine();
        assert_eq!(h.to_string(), "abs");
        assert_eq!(args.len(), 2);
    }

    #[test]
    fn unclosed_paren() {
        let e = parse_term("app (abs R M").unwrap_err();
        assert!(e.message.contains("end of input"), "{e}");
        assert_eq!((e.span.line, e.span.col), (1, 13));
    }

    #[test]
    fn fresh_shape() {
        let f = parse_formula("forall E, nabla x, fresh x E").unwrap();
        match f {
            FormulaAst::Quant(Quant::Forall, bs, body, _) => {
                assert_eq!(bs[0].name, "E");
                assert!(matches!(*body, FormulaAst::Quant(Quant::Nabla, _, _, _)));
            }
            _ => panic!("{f:?}"),
        }
    }

    #[test]
    fn formula_roundtrips() {
        for s in [
            "forall L M T, {L |- of M T} -> exists U, T = arr U U",
            "a /\\ b /\\ c \\/ d -> e -> f",
            "(a -> b) -> c",
            "a /\\ (b \\/ c)",
            "{L, of x T |- of (M x) U}@@",
            "p X Y * /\\ q (x\\ x) @",
            "(forall x, p x) -> q",
            "{pi x\\ of x T => of (M x) U}",
            "X = a :: b :: nil",
            "(X = Y) /\\ true",
        ] {
            roundtrip_f(s);
        }
    }

    #[test]
    fn commands_roundtrip() {
        let src = "Specification \"stlc\". Kind tm, ty type. Type app tm -> tm -> tm.
            Define fresh : tm -> tm -> prop by nabla x, fresh x E ; p X := q X /\\ r.
            Theorem t : forall X, p X. induction on 1. intros. case H1 (keep).
            apply IH to H2 _ with X = a, Y = b\\ b. search 3. inst H1 with n1 = c.
            cut H1 with H2. monotone H1 with L. clear H1 H2. exists arr i i. Set search_depth 7.";
        let cmds = parse_commands(src).unwrap();
        assert_eq!(cmds.len(), 16);
        for c in &cmds {
            let printed = c.to_string();
            assert_eq!(&parse_command(&printed).unwrap(), c, "{printed}");
        }
    }

    #[test]
    fn spec_files() {
        let s = parse_sig("sig stlc. kind tm, ty type. type abs ty -> (tm -> tm) -> tm.").unwrap();
        assert_eq!(s.decls.len(), 2);
        let m = parse_mod("module stlc. of (abs T R) (arr T U) :- pi x\\ of x T => of (R x) U.").unwrap();
        assert_eq!(m.clauses[0].body.len(), 1);
    }
}
