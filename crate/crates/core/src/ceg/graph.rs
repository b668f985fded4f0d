use super::{CauseTree, Conditional};

/// Index into [`CauseEffectGraph::gates`].
pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    Identity,
    Not,
    And,
    Or,
}

/// A node of the graph. Cause nodes are gates of kind `Identity` with no
/// inputs and a cause index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    Cause(usize),
    Not(NodeId),
    And(Vec<NodeId>),
    Or(Vec<NodeId>),
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Cause(_) => GateKind::Identity,
            Gate::Not(_) => GateKind::Not,
            Gate::And(_) => GateKind::And,
            Gate::Or(_) => GateKind::Or,
        }
    }

    pub fn inputs(&self) -> &[NodeId] {
        match self {
            Gate::Cause(_) => &[],
            Gate::Not(input) => std::slice::from_ref(input),
            Gate::And(inputs) | Gate::Or(inputs) => inputs,
        }
    }
}

/// Boolean graph from causes to effects. Gates are stored in topological
/// order: every input precedes the gate that reads it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CauseEffectGraph {
    pub causes: Vec<String>,
    pub effects: Vec<String>,
    pub gates: Vec<Gate>,
    /// The gate feeding each effect.
    pub effect_inputs: Vec<NodeId>,
}

impl CauseEffectGraph {
    /// Effect values for a full cause assignment.
    pub fn evaluate(&self, assignment: &[bool]) -> Vec<bool> {
        assert_eq!(assignment.len(), self.causes.len(), "assignment must cover every cause");
        let mut values: Vec<bool> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let v = match gate {
                Gate::Cause(i) => assignment[*i],
                Gate::Not(input) => !values[*input],
                Gate::And(inputs) => inputs.iter().all(|&i| values[i]),
                Gate::Or(inputs) => inputs.iter().any(|&i| values[i]),
            };
            values.push(v);
        }
        self.effect_inputs.iter().map(|&g| values[g]).collect()
    }

    /// The gate kind between the causes and effect `effect`: `Identity` when
    /// the effect reads a cause directly.
    pub fn effect_gate(&self, effect: usize) -> GateKind {
        self.gates[self.effect_inputs[effect]].kind()
    }
}

/// One shared gate structure for all effects; negated causes pass through a
/// NOT gate before entering it.
pub fn build_graph(conditional: &Conditional) -> CauseEffectGraph {
    let mut gates: Vec<Gate> = (0..conditional.causes.len()).map(Gate::Cause).collect();
    let root = wire(&conditional.tree, conditional, &mut gates);
    CauseEffectGraph {
        causes: conditional.causes.iter().map(|c| c.phrase.clone()).collect(),
        effects: conditional.effects.iter().map(|e| e.phrase.clone()).collect(),
        effect_inputs: vec![root; conditional.effects.len()],
        gates,
    }
}

fn wire(tree: &CauseTree, conditional: &Conditional, gates: &mut Vec<Gate>) -> NodeId {
    let push = |gates: &mut Vec<Gate>, gate| {
        gates.push(gate);
        gates.len() - 1
    };
    match tree {
        CauseTree::Leaf(i) if conditional.causes[*i].negated => push(gates, Gate::Not(*i)),
        CauseTree::Leaf(i) => *i,
        CauseTree::And(children) => {
            let inputs = children.iter().map(|c| wire(c, conditional, gates)).collect();
            push(gates, Gate::And(inputs))
        }
        CauseTree::Or(children) => {
            let inputs = children.iter().map(|c| wire(c, conditional, gates)).collect();
            push(gates, Gate::Or(inputs))
        }
    }
}
